//! Excursion decomposition of a discretized path.
//!
//! An excursion is a maximal interval (g_n, d_n) on which the path is away
//! from zero, delimited by zeros (or by a sign change of a signed companion
//! path, the faithful discrete surrogate when exact zeros are invisible on
//! the grid).

use crate::error::{Result, SigmaError};
use crate::path::Path;
use crate::process::SigmaProcess;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Excursion {
    pub g: usize,
    pub d: usize,
    pub unfinished: bool,
}

/// The excursion structure of one path.
///
/// `separators` marks excursion boundaries; `zero_mask` marks the indices
/// treated as exact zeros. Every masked zero is a separator, but a boundary
/// detected from a driver sign change may sit on a nonzero sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionDecomposition {
    pub intervals: Vec<Excursion>,
    pub zero_mask: Vec<bool>,
    pub separators: Vec<bool>,
    /// Last separator index at or before each index.
    pub gamma: Vec<usize>,
    /// Excursion owning each index for sign assignment (None on the zero set).
    owner: Vec<Option<usize>>,
    /// Excursion owning each index under the closed-left convention of k.
    k_owner: Vec<Option<usize>>,
    pub t0: f64,
    pub dt: f64,
}

impl ExcursionDecomposition {
    pub fn len(&self) -> usize {
        self.zero_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zero_mask.is_empty()
    }

    pub fn n_excursions(&self) -> usize {
        self.intervals.len()
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Excursion ordinal whose drawn sign applies at index `i` (None on the
    /// zero set, where the sign process vanishes).
    #[inline]
    pub fn sign_owner(&self, i: usize) -> Option<usize> {
        self.owner[i]
    }

    /// Excursion ordinal under the closed-left `1_{[g_n, d_n)}` convention.
    #[inline]
    pub fn cadlag_owner(&self, i: usize) -> Option<usize> {
        self.k_owner[i]
    }
}

fn assemble(
    separators: Vec<bool>,
    zero_mask: Vec<bool>,
    t0: f64,
    dt: f64,
) -> ExcursionDecomposition {
    let n = separators.len();
    let last = n - 1;

    // Maximal runs of non-separator indices are the excursion interiors.
    let mut intervals = Vec::new();
    let mut interior_run = vec![None; n];
    let mut i = 0;
    while i < n {
        if separators[i] {
            i += 1;
            continue;
        }
        let a = i;
        while i < n && !separators[i] {
            i += 1;
        }
        let b = i - 1;
        let run = intervals.len();
        for slot in &mut interior_run[a..=b] {
            *slot = Some(run);
        }
        // A run never starts at index 0: paths start on a separator.
        let unfinished = b == last;
        intervals.push(Excursion {
            g: a - 1,
            d: if unfinished { last } else { b + 1 },
            unfinished,
        });
    }

    let mut gamma = Vec::with_capacity(n);
    let mut last_sep = 0;
    for (i, &s) in separators.iter().enumerate() {
        if s {
            last_sep = i;
        }
        gamma.push(last_sep);
    }

    // Nearest interior run before / after each index.
    let mut prev_run = vec![None; n];
    let mut cur = None;
    for i in 0..n {
        if interior_run[i].is_some() {
            cur = interior_run[i];
        }
        prev_run[i] = cur;
    }
    let mut next_run = vec![None; n];
    cur = None;
    for i in (0..n).rev() {
        if interior_run[i].is_some() {
            cur = interior_run[i];
        }
        next_run[i] = cur;
    }

    let mut owner = vec![None; n];
    let mut k_owner = vec![None; n];
    for i in 0..n {
        if let Some(run) = interior_run[i] {
            owner[i] = Some(run);
            k_owner[i] = Some(run);
        } else if zero_mask[i] {
            // A zero acting as the left endpoint g_n carries the excursion's
            // sign under the closed-left convention; the sign process itself
            // vanishes there.
            if i < last && interior_run[i + 1].is_some() {
                k_owner[i] = interior_run[i + 1];
            }
        } else {
            // Driver-detected boundary on a nonzero sample: it belongs to
            // the adjacent excursion so that k_{gamma}·x = Z·x stays exact.
            let adopted = next_run[i].or(prev_run[i]);
            owner[i] = adopted;
            k_owner[i] = adopted;
        }
    }

    ExcursionDecomposition {
        intervals,
        zero_mask,
        separators,
        gamma,
        owner,
        k_owner,
        t0,
        dt,
    }
}

/// Decomposes a path whose zero set is observed directly: an index is a zero
/// (and a boundary) exactly when `|x_i| <= zero_tol`.
pub fn decompose(x: &Path, zero_tol: f64) -> Result<ExcursionDecomposition> {
    if zero_tol < 0.0 || !zero_tol.is_finite() {
        return Err(SigmaError::param("zero_tol", "must be nonnegative and finite"));
    }
    if x.values[0].abs() > zero_tol {
        return Err(SigmaError::NonVanishingStart { value: x.values[0], tol: zero_tol });
    }
    let zero_mask: Vec<bool> = x.values.iter().map(|v| v.abs() <= zero_tol).collect();
    Ok(assemble(zero_mask.clone(), zero_mask, x.t0, x.dt))
}

/// Decomposes |s| through the signed companion path `s`: boundaries sit at
/// exact zeros of `s` and at sign changes, assigned to the sample of smaller
/// magnitude.
pub fn decompose_signed(s: &Path) -> Result<ExcursionDecomposition> {
    if s.values[0] != 0.0 {
        return Err(SigmaError::NonVanishingStart { value: s.values[0], tol: 0.0 });
    }
    let n = s.len();
    let zero_mask: Vec<bool> = s.values.iter().map(|&v| v == 0.0).collect();
    let mut separators = zero_mask.clone();
    for i in 0..n - 1 {
        let (a, b) = (s.values[i], s.values[i + 1]);
        if a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0) {
            if a.abs() <= b.abs() {
                separators[i] = true;
            } else {
                separators[i + 1] = true;
            }
        }
    }
    Ok(assemble(separators, zero_mask, s.t0, s.dt))
}

/// The decomposition a generator's solution construction should use: via the
/// signed companion when one exists, else via the exact zeros of x.
pub fn decompose_process(p: &SigmaProcess) -> Result<ExcursionDecomposition> {
    match &p.signed {
        Some(s) => decompose_signed(s),
        None => decompose(&p.x, 0.0),
    }
}

/// γ_i: the last boundary index at or before `i`.
pub fn last_zero(dec: &ExcursionDecomposition, i: usize) -> Result<usize> {
    if i >= dec.len() {
        return Err(SigmaError::IndexOutOfRange { index: i, len: dec.len() });
    }
    Ok(dec.gamma[i])
}
