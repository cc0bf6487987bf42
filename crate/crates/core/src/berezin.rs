//! Berezinian volumes, divergence operators, the modular vector field and
//! the modular-class check.
//!
//! The divergence is assembled from its values on the frame:
//! `div(Σ α^a ∧ ∇_a + Σ β^j ∧ i_j) = Σ_a [α^a ∂_a V / V + ∇_a(α^a)] + Σ_j i_j(ŝ β^j)`
//! with `V` the base density of the volume (`W` for the symplectic one), and
//! a rescaling `s̄` adds `s̄^{-1} ∧ D(s̄)`.

use std::sync::Arc;

use crate::algebra::{CoeffFn, Mode, Superfunction, TorusIntegral};
use crate::derivations::{d_graded, pair, GradedDerivation, GradedOneForm};
use crate::error::{Error, Result};
use crate::geometry::{contract_omega, is_closed_classical, is_exact_classical, metric_volume_scale, SymplecticData};
use crate::symplectic::RothsteinForm;

#[derive(Clone, Debug, PartialEq)]
enum Base {
    Symplectic,
    Canonical,
}

/// `ξ` (built from `ω^n` and `μ_g`) or a canonical volume `Ŵ dx`, optionally
/// rescaled by an even invertible `s̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct BerezinianVolume {
    data: Arc<SymplecticData>,
    base: Base,
    density: CoeffFn,
    rescale: Option<Superfunction>,
}

impl BerezinianVolume {
    pub fn symplectic(data: &Arc<SymplecticData>) -> Self {
        BerezinianVolume {
            data: data.clone(),
            base: Base::Symplectic,
            density: data.volume_coefficient(),
            rescale: None,
        }
    }

    /// Canonical volume: integrates the top fiber coefficient against
    /// `Ŵ dx^1 ∧ … ∧ dx^d`.
    pub fn canonical(data: &Arc<SymplecticData>, w_hat: CoeffFn) -> Result<Self> {
        data.ring().ensure_same(&w_hat.ring())?;
        if w_hat.is_zero() {
            return Err(Error::DegenerateBody("canonical volume coefficient is zero".into()));
        }
        Ok(BerezinianVolume {
            data: data.clone(),
            base: Base::Canonical,
            density: w_hat,
            rescale: None,
        })
    }

    pub fn with_rescale(mut self, s_bar: Superfunction) -> Result<Self> {
        s_bar.ensure_compatible(&self.data.connection().zero())?;
        s_bar.invert_even()?;
        self.rescale = (!s_bar.is_one()).then_some(s_bar);
        Ok(self)
    }

    pub fn symplectic_data(&self) -> &Arc<SymplecticData> {
        &self.data
    }

    pub fn density(&self) -> &CoeffFn {
        &self.density
    }

    pub fn rescale(&self) -> Option<&Superfunction> {
        self.rescale.as_ref()
    }

    pub fn is_canonical(&self) -> bool {
        self.base == Base::Canonical
    }

    /// The same volume without its rescaling.
    pub fn unscaled(&self) -> Self {
        BerezinianVolume {
            rescale: None,
            ..self.clone()
        }
    }
}

/// `∫_ξ s = ∫_M (i_{μ_g} s) ω^n`; rescaled volumes integrate `s̄ ∧ s`.
pub fn berezin_integral(s: &Superfunction, vol: &BerezinianVolume) -> Result<TorusIntegral> {
    if vol.data.ring().mode == Mode::Chart {
        return Err(Error::ChartModeUnsupported);
    }
    s.ensure_compatible(&vol.data.connection().zero())?;
    let u = match &vol.rescale {
        Some(sb) => sb * s,
        None => s.clone(),
    };
    let top = match vol.base {
        Base::Symplectic => u.top_coefficient().scale(&metric_volume_scale(&vol.data)?),
        Base::Canonical => u.top_coefficient(),
    };
    (&top * &vol.density).torus_integral()
}

#[derive(Clone, Debug)]
pub struct DivergenceOperator {
    volume: BerezinianVolume,
    log_derivatives: Vec<CoeffFn>,
    rescale_inverse: Option<Superfunction>,
}

impl DivergenceOperator {
    pub fn new(volume: BerezinianVolume) -> Result<Self> {
        let v = volume.density.clone();
        let log_derivatives = (0..volume.data.dim())
            .map(|a| {
                let dv = v.partial(a);
                if dv.is_zero() {
                    Ok(dv)
                } else {
                    dv.checked_div(&v).map_err(|_| Error::NonUnitVolumeCoefficient(v.ring().mode))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let rescale_inverse = volume.rescale.as_ref().map(Superfunction::invert_even).transpose()?;
        Ok(DivergenceOperator {
            volume,
            log_derivatives,
            rescale_inverse,
        })
    }

    pub fn symplectic(data: &Arc<SymplecticData>) -> Result<Self> {
        Self::new(BerezinianVolume::symplectic(data))
    }

    pub fn volume(&self) -> &BerezinianVolume {
        &self.volume
    }

    /// `div^{ω^n}(∂_a) = ∂_a V / V`.
    pub fn coordinate_divergence(&self, a: usize) -> &CoeffFn {
        &self.log_derivatives[a]
    }

    /// Divergence for the unscaled volume.
    pub fn base_divergence(&self, d: &GradedDerivation) -> Result<Superfunction> {
        if **d.connection() != **self.volume.data.connection() {
            return Err(Error::Shape("derivation is not over this volume's connection".into()));
        }
        let conn = d.connection();
        let mut out = conn.zero();
        for (a, alpha) in d.nabla_components().iter().enumerate() {
            if alpha.is_zero() {
                continue;
            }
            let va = &self.log_derivatives[a];
            if !va.is_zero() {
                out = &out + &alpha.scale(va);
            }
            out = &out + &conn.nabla(a, alpha);
        }
        for (j, beta) in d.contraction_components().iter().enumerate() {
            if !beta.is_zero() {
                out = &out + &beta.involution().contract(j);
            }
        }
        Ok(out)
    }

    pub fn divergence(&self, d: &GradedDerivation) -> Result<Superfunction> {
        let base = self.base_divergence(d)?;
        match (&self.volume.rescale, &self.rescale_inverse) {
            (Some(sb), Some(inv)) => Ok(&base + &(inv * &d.apply(sb)?)),
            _ => Ok(base),
        }
    }
}

pub fn divergence(d: &GradedDerivation, op: &DivergenceOperator) -> Result<Superfunction> {
    op.divergence(d)
}

/// `div(D) + s̄^{-1} ∧ D(s̄)` on top of `op` (which may itself be rescaled).
pub fn divergence_rescaled(d: &GradedDerivation, s_bar: &Superfunction, op: &DivergenceOperator) -> Result<Superfunction> {
    let inv = s_bar.invert_even()?;
    Ok(&op.divergence(d)? + &(&inv * &d.apply(s_bar)?))
}

/// `div(D) + ⟨D; d^G log s̄⟩`, for `body(s̄) = 1`.
pub fn divergence_rescaled_log(d: &GradedDerivation, s_bar: &Superfunction, op: &DivergenceOperator) -> Result<Superfunction> {
    let log = s_bar.log_even()?;
    Ok(&op.divergence(d)? + &pair(d, &d_graded(d.connection(), &log)?)?)
}

/// `Z(u) = div(D_u)`, assembled from the values on `x^a` and `e_j`.
pub fn modular_field(th: &RothsteinForm, op: &DivergenceOperator) -> Result<GradedDerivation> {
    let conn = th.connection().clone();
    let on_coordinates = (0..conn.dim())
        .map(|a| op.divergence(&th.coordinate_field(a)?))
        .collect::<Result<Vec<_>>>()?;
    let on_generators = (0..conn.rank())
        .map(|j| {
            let e = Superfunction::generator(conn.ring(), conn.rank(), j)?;
            op.divergence(&th.hamiltonian_field(&e)?)
        })
        .collect::<Result<Vec<_>>>()?;
    GradedDerivation::from_action(conn, on_coordinates, on_generators)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularVerdict {
    pub trivial: bool,
    /// Degree-0 part of the `∇`-components of `Z`.
    pub classical_field: Vec<CoeffFn>,
    /// `α = ι_{X_Z} ω`.
    pub certificate: Vec<CoeffFn>,
}

/// Triviality of the class of `z` modulo Hamiltonian derivations, decided on
/// the classical part `X_Z`.
pub fn classify_modular_field(z: &GradedDerivation, sd: &SymplecticData) -> Result<ModularVerdict> {
    let classical_field = z.classical_part();
    let certificate = contract_omega(&classical_field, sd);
    if !is_closed_classical(&certificate) {
        return Err(Error::NotLocallyHamiltonian);
    }
    Ok(ModularVerdict {
        trivial: is_exact_classical(&certificate),
        classical_field,
        certificate,
    })
}

pub fn modular_class_trivial(th: &RothsteinForm, op: &DivergenceOperator) -> Result<ModularVerdict> {
    let z = modular_field(th, op)?;
    classify_modular_field(&z, th.symplectic_data())
}

/// `e^f = W / Ŵ` as a degree-0 superfunction.
pub fn canonical_comparison(w_hat: &CoeffFn, sd: &SymplecticData) -> Result<Superfunction> {
    let w = sd.volume_coefficient();
    let q = w.checked_div(w_hat).map_err(|_| Error::InexactQuotient)?;
    Ok(Superfunction::from_coeff(sd.rank(), q))
}

/// Checks `e^f (div^{symp}(D) - div^{can}(D)) = D(e^f)`.
pub fn canonical_relation_holds(d: &GradedDerivation, w_hat: &CoeffFn, data: &Arc<SymplecticData>) -> Result<bool> {
    let ef = canonical_comparison(w_hat, data)?;
    let symp = DivergenceOperator::symplectic(data)?;
    let can = DivergenceOperator::new(BerezinianVolume::canonical(data, w_hat.clone())?)?;
    let lhs = &ef * &(&symp.divergence(d)? - &can.divergence(d)?);
    Ok(lhs == d.apply(&ef)?)
}

/// `-s̄^{-1} ∧ d^G s̄`, the one-form whose Hamiltonian field is the change of
/// the modular field under rescaling by `s̄`.
pub fn rescaling_form(s_bar: &Superfunction, th: &RothsteinForm) -> Result<GradedOneForm> {
    let inv = s_bar.invert_even()?;
    Ok(d_graded(th.connection(), s_bar)?.scale_left(&inv).neg())
}
