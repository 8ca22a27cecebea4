//! Binary linear codes with exact, brute-force metadata.
//!
//! Every code keeps the parity-check rows exactly as presented (redundant rows
//! included, since testers sample them) and derives its dimension from rank.

mod families;
mod pchk;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{check_budget, Error, Result};
use crate::gf2::{BitMatrix, BitWord};
use crate::rational::{from_usize, Rational};

pub use families::{hamming_code, parity_code, random_ldpc, tensor_product};
pub use pchk::{read_pchk, write_pchk};

/// Default cap on enumeration work (codewords, syndromes, error patterns).
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Largest dense generator matrix, in bits, that `from_parity_check` will build.
pub const MAX_GENERATOR_BITS: u64 = 1 << 24;

/// Grid structure of a tensor product code: `rows x cols` cells, row-major,
/// every grid row a codeword of `row_code` and every column one of `col_code`.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    pub rows: usize,
    pub cols: usize,
    pub row_code: Arc<LinearCode>,
    pub col_code: Arc<LinearCode>,
}

impl TensorLayout {
    /// 1-indexed positions of grid row `r`.
    pub fn row_positions(&self, r: usize) -> Vec<usize> {
        ((r - 1) * self.cols + 1..=r * self.cols).collect()
    }

    /// 1-indexed positions of grid column `s`.
    pub fn col_positions(&self, s: usize) -> Vec<usize> {
        (1..=self.rows).map(|r| (r - 1) * self.cols + s).collect()
    }
}

/// A binary linear code given by a generator/parity-check pair.
#[derive(Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity_check: BitMatrix,
    check_rank: usize,
    min_distance: OnceLock<Rational>,
    tensor: Option<TensorLayout>,
}

impl Clone for LinearCode {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(d) = self.min_distance.get() {
            let _ = cache.set(d.clone());
        }
        LinearCode {
            n: self.n,
            k: self.k,
            generator: self.generator.clone(),
            parity_check: self.parity_check.clone(),
            check_rank: self.check_rank,
            min_distance: cache,
            tensor: self.tensor.clone(),
        }
    }
}

/// Result of [`LinearCode::nearest_codeword`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nearest {
    pub codeword: BitWord,
    /// Number of differing positions.
    pub errors: usize,
    pub distance: Rational,
    /// False when another codeword sits at the same distance.
    pub unique: bool,
}

impl LinearCode {
    /// The code `{x : H·x = 0}`. Redundant rows of `H` are kept.
    pub fn from_parity_check(h: BitMatrix) -> Result<Self> {
        let n = h.cols();
        if n == 0 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        let check_rank = h.rank();
        check_budget("generator matrix bits", (n - check_rank) as u128 * n as u128, MAX_GENERATOR_BITS)?;
        let generator = h.kernel_basis();
        let code = LinearCode {
            n,
            k: n - check_rank,
            generator,
            parity_check: h,
            check_rank,
            min_distance: OnceLock::new(),
            tensor: None,
        };
        debug_assert!(code.invariants_hold());
        Ok(code)
    }

    pub(crate) fn with_tensor_layout(mut self, layout: TensorLayout) -> Self {
        self.tensor = Some(layout);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// Rank of the parity-check rows, `n - k`.
    pub fn check_rank(&self) -> usize {
        self.check_rank
    }

    pub fn tensor_layout(&self) -> Option<&TensorLayout> {
        self.tensor.as_ref()
    }

    pub fn rate(&self) -> Rational {
        Rational::new(BigInt::from(self.k), BigInt::from(self.n))
    }

    /// Rate deficit `1 - k/n`.
    pub fn epsilon(&self) -> Rational {
        Rational::new(BigInt::from(self.n - self.k), BigInt::from(self.n))
    }

    /// G·Hᵀ = 0, rank(G) = k, rank(H) = n - k.
    pub fn invariants_hold(&self) -> bool {
        self.generator.rows() == self.k
            && self.generator.rank() == self.k
            && self.parity_check.rank() == self.n - self.k
            && self.generator.mul_transpose(&self.parity_check).map(|m| m.is_zero()).unwrap_or(false)
    }

    /// Membership via the parity checks.
    pub fn contains(&self, w: &BitWord) -> Result<bool> {
        if w.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: w.len() });
        }
        Ok(self.parity_check.row_iter().all(|row| !row.dot(w)))
    }

    /// `m·G` for a message `m` of length `k`, in the generator's own basis.
    pub fn combine(&self, m: &BitWord) -> Result<BitWord> {
        self.generator.vec_mat(m)
    }

    /// Calls `f` on every codeword, in Gray-code order starting from zero.
    pub fn for_each_codeword(&self, budget: u64, mut f: impl FnMut(&BitWord)) -> Result<()> {
        check_budget("codeword enumeration", 1u128 << self.k.min(127), budget)?;
        let mut c = BitWord::zeros(self.n);
        f(&c);
        for step in 1u64..(1u64 << self.k) {
            c.xor_assign(self.generator.row(step.trailing_zeros() as usize));
            f(&c);
        }
        Ok(())
    }

    pub fn codewords(&self, budget: u64) -> Result<Vec<BitWord>> {
        let mut out = Vec::with_capacity(1usize << self.k.min(20));
        self.for_each_codeword(budget, |c| out.push(c.clone()))?;
        Ok(out)
    }

    /// Exact minimum relative weight of a nonzero codeword.
    ///
    /// Enumerates the code when `2^k` is the smaller side, otherwise the dual
    /// code followed by the MacWilliams transform. The result is cached.
    pub fn min_distance(&self, budget: u64) -> Result<Rational> {
        if let Some(d) = self.min_distance.get() {
            return Ok(d.clone());
        }
        if self.k == 0 {
            return Err(Error::invalid("the zero code has no nonzero codewords"));
        }
        let r = self.n - self.k;
        let side = self.k.min(r);
        check_budget("distance", 1u128 << side.min(127), budget)?;
        let weight = if self.k <= r { self.min_weight_direct(budget)? } else { self.min_weight_dual(budget)? };
        let d = Rational::new(BigInt::from(weight), BigInt::from(self.n));
        let _ = self.min_distance.set(d.clone());
        Ok(d)
    }

    /// Smallest nonzero codeword weight, as an integer count.
    pub fn min_weight(&self, budget: u64) -> Result<usize> {
        let d = self.min_distance(budget)?;
        Ok((d * from_usize(self.n)).to_integer().try_into().expect("weight fits usize"))
    }

    fn min_weight_direct(&self, budget: u64) -> Result<usize> {
        let mut best = usize::MAX;
        self.for_each_codeword(budget, |c| {
            let w = c.weight();
            if w > 0 && w < best {
                best = w;
            }
        })?;
        Ok(best)
    }

    fn min_weight_dual(&self, budget: u64) -> Result<usize> {
        let n = self.n;
        let dual = self.parity_check.row_basis();
        let r = dual.rows();
        check_budget("dual enumeration", 1u128 << r.min(127), budget)?;
        let mut dual_weights = vec![BigInt::zero(); n + 1];
        let mut c = BitWord::zeros(n);
        dual_weights[0] += 1;
        for step in 1u64..(1u64 << r) {
            c.xor_assign(dual.row(step.trailing_zeros() as usize));
            dual_weights[c.weight()] += 1;
        }
        let binom = binomial_table(n);
        for i in 1..=n {
            // |C⊥|·A_i = Σ_j B_j K_i(j), with K_i the Krawtchouk polynomial.
            let mut total = BigInt::zero();
            for (j, bj) in dual_weights.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let mut kraw = BigInt::zero();
                for s in 0..=i.min(j) {
                    if i - s > n - j {
                        continue;
                    }
                    let term = &binom[j][s] * &binom[n - j][i - s];
                    if s % 2 == 0 {
                        kraw += term;
                    } else {
                        kraw -= term;
                    }
                }
                total += bj * kraw;
            }
            if total.is_positive() {
                return Ok(i);
            }
        }
        unreachable!("a code with k > 0 has a nonzero codeword")
    }

    /// Closest codeword to `w`, ties broken by the lexicographically smallest codeword.
    pub fn nearest_codeword(&self, w: &BitWord, budget: u64) -> Result<Nearest> {
        if w.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: w.len() });
        }
        if self.k < 64 && (1u128 << self.k) <= budget as u128 {
            return self.nearest_by_codewords(w, budget);
        }
        self.nearest_by_error_patterns(w, budget)
    }

    fn nearest_by_codewords(&self, w: &BitWord, budget: u64) -> Result<Nearest> {
        let mut best: Option<(usize, BitWord)> = None;
        let mut ties = 0usize;
        self.for_each_codeword(budget, |c| {
            let d = c.hamming_distance(w).expect("same length");
            match &mut best {
                None => {
                    best = Some((d, c.clone()));
                    ties = 1;
                }
                Some((bd, bc)) => {
                    if d < *bd {
                        *bd = d;
                        *bc = c.clone();
                        ties = 1;
                    } else if d == *bd {
                        ties += 1;
                        if c < bc {
                            *bc = c.clone();
                        }
                    }
                }
            }
        })?;
        let (errors, codeword) = best.expect("code contains zero");
        Ok(Nearest { codeword, errors, distance: self.relative(errors), unique: ties == 1 })
    }

    fn nearest_by_error_patterns(&self, w: &BitWord, budget: u64) -> Result<Nearest> {
        let target = self.parity_check.mat_vec(w)?;
        let mut spent: u128 = 0;
        for weight in 0..=self.n {
            let mut found: Vec<BitWord> = Vec::new();
            let mut positions: Vec<usize> = (1..=weight).collect();
            loop {
                spent += 1;
                check_budget("nearest-codeword search", spent, budget)?;
                let e = BitWord::from_support(self.n, &positions);
                if self.parity_check.mat_vec(&e)? == target {
                    found.push(w.xor(&e));
                }
                if !next_combination(&mut positions, self.n) {
                    break;
                }
            }
            if !found.is_empty() {
                let unique = found.len() == 1;
                let codeword = found.into_iter().min().expect("nonempty");
                return Ok(Nearest { codeword, errors: weight, distance: self.relative(weight), unique });
            }
        }
        unreachable!("the all-positions pattern always reaches a codeword")
    }

    /// Table of coset-leader weights, i.e. `n·dist(w, C)` indexed by syndrome.
    pub fn coset_table(&self, budget: u64) -> Result<CosetTable> {
        let basis = self.parity_check.row_basis();
        let r = basis.rows();
        if r >= 64 {
            return Err(Error::BudgetExceeded { what: "coset table", needed: u128::MAX, budget });
        }
        check_budget("coset table", (1u128 << r) * self.n as u128, budget.saturating_mul(self.n as u64))?;
        let columns: Vec<u64> = (1..=self.n).map(|j| syndrome_bits(&basis, &BitWord::unit(self.n, j))).collect();
        let size = 1usize << r;
        let mut leader = vec![u32::MAX; size];
        leader[0] = 0;
        let mut frontier = vec![0u64];
        let mut depth = 0u32;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &s in &frontier {
                for &col in &columns {
                    let t = (s ^ col) as usize;
                    if leader[t] == u32::MAX {
                        leader[t] = depth;
                        next.push(t as u64);
                    }
                }
            }
            frontier = next;
        }
        Ok(CosetTable { basis, leader, n: self.n })
    }

    fn relative(&self, count: usize) -> Rational {
        Rational::new(BigInt::from(count), BigInt::from(self.n))
    }

    /// Recovers a tensor layout from the parity-check rows alone.
    ///
    /// Succeeds when every row is supported inside one grid row or one grid
    /// column for some factorisation `n = rows·cols` (both ≥ 2), and the tensor
    /// product of the recovered factor codes is exactly this code.
    pub fn infer_tensor_layout(&self) -> Option<TensorLayout> {
        if let Some(t) = &self.tensor {
            return Some(t.clone());
        }
        for rows in 2..self.n {
            if !self.n.is_multiple_of(rows) || self.n / rows < 2 {
                continue;
            }
            let cols = self.n / rows;
            let mut row_checks = BitMatrix::empty(cols);
            let mut col_checks = BitMatrix::empty(rows);
            let mut ok = true;
            for h in self.parity_check.row_iter() {
                let support = h.support();
                let Some(&first) = support.first() else { continue };
                let grid_row = (first - 1) / cols;
                let grid_col = (first - 1) % cols;
                if support.iter().all(|&p| (p - 1) / cols == grid_row) {
                    let local: Vec<usize> = support.iter().map(|&p| (p - 1) % cols + 1).collect();
                    row_checks.push_row(BitWord::from_support(cols, &local)).expect("width");
                } else if support.iter().all(|&p| (p - 1) % cols == grid_col) {
                    let local: Vec<usize> = support.iter().map(|&p| (p - 1) / cols + 1).collect();
                    col_checks.push_row(BitWord::from_support(rows, &local)).expect("height");
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let (Ok(row_code), Ok(col_code)) =
                (LinearCode::from_parity_check(row_checks), LinearCode::from_parity_check(col_checks))
            else {
                continue;
            };
            let Ok(product) = tensor_product(&col_code, &row_code) else { continue };
            let same = product.k() == self.k()
                && self.generator.row_iter().all(|g| product.contains(g).unwrap_or(false));
            if same {
                return product.tensor;
            }
        }
        None
    }
}

/// Coset-leader weights for every syndrome of a code.
#[derive(Clone, Debug)]
pub struct CosetTable {
    basis: BitMatrix,
    leader: Vec<u32>,
    n: usize,
}

impl CosetTable {
    /// Number of flips separating `w` from the nearest codeword.
    pub fn errors(&self, w: &BitWord) -> usize {
        self.leader[syndrome_bits(&self.basis, w) as usize] as usize
    }

    pub fn distance(&self, w: &BitWord) -> Rational {
        Rational::new(BigInt::from(self.errors(w)), BigInt::from(self.n))
    }

    /// Covering radius in flips.
    pub fn max_errors(&self) -> usize {
        self.leader.iter().copied().max().unwrap_or(0) as usize
    }
}

fn syndrome_bits(basis: &BitMatrix, w: &BitWord) -> u64 {
    basis.row_iter().enumerate().fold(0u64, |acc, (r, row)| if row.dot(w) { acc | 1 << r } else { acc })
}

fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for a in 0..=n {
        t[a][0] = BigInt::from(1);
        for b in 1..=a {
            t[a][b] = &t[a - 1][b - 1] + &t[a - 1][b];
        }
    }
    t
}

/// Advances a strictly increasing 1-indexed combination of `{1..n}`.
pub(crate) fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let k = positions.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if positions[i] < n - (k - 1 - i) {
            positions[i] += 1;
            for j in i + 1..k {
                positions[j] = positions[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Relative Hamming distance `#{i : x_i ≠ y_i} / n`.
pub fn relative_distance(x: &BitWord, y: &BitWord) -> Result<Rational> {
    let d = x.hamming_distance(y)?;
    if x.is_empty() {
        return Err(Error::invalid("distance between empty words"));
    }
    Ok(Rational::new(BigInt::from(d), BigInt::from(x.len())))
}

/// A code together with an encoder that writes the message verbatim at
/// positions `perm(1..=k)`.
#[derive(Clone, Debug)]
pub struct SystematicCode {
    code: Arc<LinearCode>,
    generator: BitMatrix,
    perm: Vec<usize>,
}

impl SystematicCode {
    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    /// Row-equivalent generator with an identity at the message positions.
    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// `perm[i-1]` is the codeword position carrying message symbol `i`;
    /// entries after `k` list the remaining positions in increasing order.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn message_position(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.code.k() {
            return Err(Error::IndexOutOfRange { index: i, len: self.code.k() });
        }
        Ok(self.perm[i - 1])
    }

    pub fn encode(&self, m: &BitWord) -> Result<BitWord> {
        if m.len() != self.code.k() {
            return Err(Error::DimensionMismatch { expected: self.code.k(), got: m.len() });
        }
        self.generator.vec_mat(m)
    }

    /// Reads the message back from a codeword.
    pub fn extract(&self, c: &BitWord) -> Result<BitWord> {
        if c.len() != self.code.n() {
            return Err(Error::DimensionMismatch { expected: self.code.n(), got: c.len() });
        }
        Ok(BitWord::from_bools(&self.perm[..self.code.k()].iter().map(|&p| c.get(p)).collect::<Vec<_>>()))
    }
}

/// Gaussian elimination on the generator; pivots become message positions.
pub fn systematize(code: &Arc<LinearCode>) -> SystematicCode {
    let red = code.generator().row_reduce();
    let generator = BitMatrix::from_rows(code.n(), red.rref.row_iter().take(red.rank).cloned().collect())
        .expect("rows have width n");
    let mut perm = red.pivots.clone();
    let mut is_pivot = vec![false; code.n() + 1];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    perm.extend((1..=code.n()).filter(|&c| !is_pivot[c]));
    SystematicCode { code: Arc::clone(code), generator, perm }
}
