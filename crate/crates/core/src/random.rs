//! Seeded random states for fuzzing and demos.
//!
//! Every state is built as `γ = Sᵀ D S` with `D = diag(ν₁, ν₁, ν₂, ν₂, …)`,
//! `νᵢ ≥ 1`, so physicality holds by construction.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaussian::CorrelationMatrix;
use crate::symplectic::{derive_seed, form, random_symplectic_with, SymplecticMatrix};
use crate::two_mode::{check_physical, StdFormParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// Thermal spectrum scrambled by a global random symplectic map.
    Thermal,
    /// A two-mode squeezed pair between A's and B's first modes, mild
    /// thermal noise, weak global mixing and local scrambling.
    Entangled,
    /// A squeezed thermal pair whose smallest partially transposed
    /// symplectic eigenvalue sits within 10⁻³ of one, locally scrambled.
    Boundary,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Thermal => "thermal",
            StateKind::Entangled => "entangled",
            StateKind::Boundary => "boundary",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thermal" => Ok(StateKind::Thermal),
            "entangled" => Ok(StateKind::Entangled),
            "boundary" => Ok(StateKind::Boundary),
            other => Err(Error::Precondition(format!("unknown state kind {other:?}"))),
        }
    }
}

fn thermal_diagonal(nus: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        2 * nus.len(),
        nus.iter().flat_map(|&v| [v, v]),
    ))
}

/// Two-mode squeezer on global modes `i` and `j`; it maps the vacuum to
/// the two-mode squeezed vacuum with squeezing `r`.
pub fn two_mode_squeezer(n: usize, i: usize, j: usize, r: f64) -> SymplecticMatrix {
    let (c, s) = (r.cosh(), r.sinh());
    let mut m = DMatrix::identity(2 * n, 2 * n);
    for k in 0..2 {
        let sign = if k == 0 { 1.0 } else { -1.0 };
        let (a, b) = (2 * i + k, 2 * j + k);
        m[(a, a)] = c;
        m[(b, b)] = c;
        m[(a, b)] = sign * s;
        m[(b, a)] = sign * s;
    }
    SymplecticMatrix::new_unchecked(m)
}

fn local_scramble(n_a: usize, n_b: usize, rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let side = |n: usize, rng: &mut ChaCha8Rng| {
        if n == 0 {
            SymplecticMatrix::identity(0)
        } else {
            SymplecticMatrix::new_unchecked(random_symplectic_with(n, rng))
        }
    };
    let a = side(n_a, rng);
    a.direct_sum(&side(n_b, rng))
}

/// A random physical state of the given kind, deterministic in `seed`.
pub fn random_state(n_a: usize, n_b: usize, seed: u64, kind: StateKind) -> Result<CorrelationMatrix> {
    let n = n_a + n_b;
    if n == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    if kind != StateKind::Thermal && (n_a == 0 || n_b == 0) {
        return Err(Error::Precondition(format!(
            "{kind} states need at least one mode per side"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x5eed));
    let gamma = match kind {
        StateKind::Thermal => {
            let nus: Vec<f64> = (0..n).map(|_| 1.0 + 2.0 * rng.gen::<f64>()).collect();
            let s = random_symplectic_with(n, &mut rng);
            s.transpose() * thermal_diagonal(&nus) * s
        }
        StateKind::Entangled => {
            let r = rng.gen_range(0.3..1.2);
            let nus: Vec<f64> = (0..n).map(|_| 1.0 + 0.3 * rng.gen::<f64>()).collect();
            let sq = two_mode_squeezer(n, 0, n_a, r);
            let mut g = sq.congruence(&thermal_diagonal(&nus));
            let mix = (form(n) * weak_hamiltonian(n, &mut rng)).exp();
            g = mix.transpose() * g * &mix;
            local_scramble(n_a, n_b, &mut rng).congruence(&g)
        }
        StateKind::Boundary => {
            let r: f64 = rng.gen_range(0.2..0.8);
            let offset = 10f64.powf(rng.gen_range(-9.0..-3.0));
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            // the partial transpose of ν·TMSS(r) has smallest symplectic
            // eigenvalue ν e^{-2r}
            let nu_pair = (2.0 * r).exp() * (1.0 + sign * offset);
            let nus: Vec<f64> = (0..n)
                .map(|k| {
                    if k == 0 || k == n_a {
                        nu_pair
                    } else {
                        1.0 + rng.gen::<f64>()
                    }
                })
                .collect();
            let sq = two_mode_squeezer(n, 0, n_a, r);
            let g = sq.congruence(&thermal_diagonal(&nus));
            local_scramble(n_a, n_b, &mut rng).congruence(&g)
        }
    };
    CorrelationMatrix::derived(gamma, n_a, n_b)
}

fn weak_hamiltonian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let dim = 2 * n;
    let bound = 0.15 / (dim as f64).sqrt();
    let mut h = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let x: f64 = rng.gen_range(-bound..bound);
            h[(r, c)] = x;
            h[(c, r)] = x;
        }
    }
    h
}

/// Random physical symmetric standard-form parameters `(n, n, k_x, k_p)`
/// with `1 ≤ n ≤ 3`, either separable or not.
pub fn random_symmetric_params(seed: u64) -> StdFormParams {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x5111));
    loop {
        let n = rng.gen_range(1.0..3.0);
        let k_x = rng.gen_range(0.0..(n * n - 1.0f64).sqrt());
        let k_p = rng.gen_range(-k_x..=k_x);
        let p = StdFormParams::new(n, n, k_x, k_p);
        if check_physical(&p, 0.0).physical {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{is_npt, validate_physical, DEFAULT_TOL};
    use crate::two_mode::tmss_cm;

    #[test]
    fn squeezer_builds_tmss() {
        let s = two_mode_squeezer(2, 0, 1, 0.4);
        assert!(s.defect() < 1e-14);
        let g = s.congruence(&DMatrix::identity(4, 4));
        let t = tmss_cm(0.4).unwrap();
        assert!((g - t.entries()).abs().max() < 1e-14);
    }

    #[test]
    fn generated_states_are_physical_and_reproducible() {
        for kind in [StateKind::Thermal, StateKind::Entangled, StateKind::Boundary] {
            for seed in 0..10 {
                let g = random_state(2, 3, seed, kind).unwrap();
                assert_eq!(g, random_state(2, 3, seed, kind).unwrap());
                assert!(validate_physical(&g, DEFAULT_TOL).unwrap().physical, "{kind} {seed}");
            }
        }
    }

    #[test]
    fn boundary_states_hug_the_boundary() {
        for seed in 0..20 {
            let g = random_state(1, 2, seed, StateKind::Boundary).unwrap();
            let v = is_npt(&g, 1e-12).unwrap();
            assert!((v.min_pt_symplectic_eigenvalue - 1.0).abs() < 1.1e-3);
        }
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("entangled".parse::<StateKind>().unwrap(), StateKind::Entangled);
        assert!("hot".parse::<StateKind>().is_err());
        assert!(random_state(0, 2, 1, StateKind::Entangled).is_err());
    }
}
