//! Bell states, noisy source states and the four-photon product state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expectation, ComplexMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Two-qubit Bell state. Φ± = (|00⟩ ± |11⟩)/√2, Ψ± = (|01⟩ ± |10⟩)/√2.
pub fn bell(kind: BellKind) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => [s, 0.0, 0.0, s],
        BellKind::PhiMinus => [s, 0.0, 0.0, -s],
        BellKind::PsiPlus => [0.0, s, s, 0.0],
        BellKind::PsiMinus => [0.0, s, -s, 0.0],
    };
    PureState::from_real(&amps).expect("Bell states are normalized")
}

pub fn bell_projector(kind: BellKind) -> ComplexMatrix {
    bell(kind).projector()
}

/// Noise model of one entangled-pair source.
///
/// `v` is the weight of the ideal Φ⁺ component; of the remaining `1 - v`, a
/// fraction `lam` is coloured (Φ⁺/Φ⁻ dephasing) and the rest is white.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceNoise {
    pub v: f64,
    pub lam: f64,
}

impl SourceNoise {
    pub fn new(v: f64, lam: f64) -> Result<Self> {
        let n = Self { v, lam };
        n.validate()?;
        Ok(n)
    }

    pub const IDEAL: SourceNoise = SourceNoise { v: 1.0, lam: 0.0 };

    pub fn validate(&self) -> Result<()> {
        check_unit("v", self.v)?;
        check_unit("lam", self.lam)
    }

    /// ZZ correlation of the source state: `v(1 - λ) + λ`.
    pub fn zz_correlation(&self) -> f64 {
        self.v * (1.0 - self.lam) + self.lam
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGEN_TOL: f64 = 1e-9;

    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_hermitian(Self::HERMITIAN_TOL) {
            return Err(Error::NotDensityMatrix("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = m.min_eigenvalue();
        if min < -Self::EIGEN_TOL {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self(psi.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        expectation(op, &self.0)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &PureState) -> f64 {
        self.0.trace_product(&psi.projector()).re
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Source state `v Φ⁺ + (1-v)[λ/2 (Φ⁺ + Φ⁻) + (1-λ)/4 𝕀]`.
pub fn source_state(noise: SourceNoise) -> Result<DensityMatrix> {
    noise.validate()?;
    let SourceNoise { v, lam } = noise;
    let phi_p = bell_projector(BellKind::PhiPlus);
    let phi_m = bell_projector(BellKind::PhiMinus);
    let coloured = (&phi_p + &phi_m).scale(0.5);
    let white = ComplexMatrix::identity(4).scale(0.25);
    let rho = &(&phi_p.scale(v) + &coloured.scale((1.0 - v) * lam))
        + &white.scale((1.0 - v) * (1.0 - lam));
    DensityMatrix::new(rho)
}

/// Werner state `V Φ⁺ + (1-V)/4 𝕀`, valid for `V ∈ [-1/3, 1]`.
pub fn werner(visibility: f64) -> Result<DensityMatrix> {
    if !(-1.0 / 3.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidParameter {
            name: "V",
            value: visibility,
            reason: "Werner state is positive only for V in [-1/3, 1]",
        });
    }
    let phi_p = bell_projector(BellKind::PhiPlus);
    let white = ComplexMatrix::identity(4).scale(0.25);
    DensityMatrix::new(&phi_p.scale(visibility) + &white.scale(1.0 - visibility))
}

/// `ρ_AB ⊗ ρ_B′C`, subsystem order A, B, B′, C.
pub fn four_photon_state(rho_ab: &DensityMatrix, rho_bc: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_ab.dim() != 4 || rho_bc.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit sources expected, got dims {} and {}",
            rho_ab.dim(),
            rho_bc.dim()
        )));
    }
    Ok(DensityMatrix(rho_ab.matrix().kron(rho_bc.matrix())))
}

/// Amplitudes of a four-qubit state in the regrouped basis
/// `|Bell⟩_AC ⊗ |Bell⟩_BB′`, indexed `[ac][bb′]` by [`BellKind::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct SwappedBellCoefficients(pub [[Complex64; 4]; 4]);

impl SwappedBellCoefficients {
    pub fn get(&self, ac: BellKind, bb: BellKind) -> Complex64 {
        self.0[ac.index()][bb.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }
}

/// Subsystem order A, C, B, B′ expressed as a permutation of A, B, B′, C.
pub const REGROUP_AC_BB: [usize; 4] = [0, 3, 1, 2];

/// Decomposes a four-qubit pure state (order A, B, B′, C) over the
/// Bell ⊗ Bell basis of the pairs AC and BB′.
pub fn bell_decompose_swapped(psi: &PureState) -> Result<SwappedBellCoefficients> {
    decompose_in_order(psi, &REGROUP_AC_BB)
}

/// Same decomposition with an explicit regrouping; `perm = [0, 1, 2, 3]`
/// treats the input as already ordered A, C, B, B′.
pub fn decompose_in_order(psi: &PureState, perm: &[usize]) -> Result<SwappedBellCoefficients> {
    if psi.dim() != 16 {
        return Err(Error::DimensionMismatch(format!(
            "four-qubit state expected, got dim {}",
            psi.dim()
        )));
    }
    let norm2 = psi.inner(psi).re;
    if (norm2 - 1.0).abs() > PureState::NORM_TOL {
        return Err(Error::NotNormalized(norm2));
    }
    let regrouped = psi.permute_subsystems(&[2, 2, 2, 2], perm)?;
    let mut coeffs = [[Complex64::new(0.0, 0.0); 4]; 4];
    for ac in BellKind::ALL {
        for bb in BellKind::ALL {
            let basis = bell(ac).tensor(&bell(bb));
            coeffs[ac.index()][bb.index()] = basis.inner(&regrouped);
        }
    }
    Ok(SwappedBellCoefficients(coeffs))
}
