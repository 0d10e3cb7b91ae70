use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// A monomial `x^α`, stored as its exponent vector together with the total degree.
///
/// `Ord` is the graded reverse lexicographic order of [`MonomialOrder::Grevlex`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars], degree: 0 }
    }

    /// The variable `x_i` in an `nvars`-variable context.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps, degree: 1 }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, degree: self.degree + other.degree }
    }

    /// `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps = other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect();
        Some(Monomial { exps, degree: other.degree - self.degree })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Index of the single variable if this monomial is a pure power `x_i^k`, `k ≥ 1`.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    /// Variables that occur in the monomial.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut acc = 1.0;
        for (&e, &x) in self.exps.iter().zip(point) {
            for _ in 0..e {
                acc *= x;
            }
        }
        acc
    }

    /// Writes the monomial with the given variable names, `1` for the constant monomial.
    pub fn write_with<W: fmt::Write>(&self, f: &mut W, names: &[&str]) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            match names.get(i) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "x{}", i)?,
            }
            if e > 1 {
                write!(f, "^{}", e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &[])
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &[])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex(self, other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded reverse lexicographic comparison.
///
/// Variables declared later rank higher (`x_{n-1} ≻ … ≻ x_0`): on equal degree,
/// `a ≻ b` when the first nonzero entry of `a − b` is negative.
fn grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    grevlex_slices(&a.exps, a.degree, &b.exps, b.degree)
}

fn grevlex_slices(a: &[u32], da: u32, b: &[u32], db: u32) -> Ordering {
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            ord => return ord.reverse(),
        }
    }
    Ordering::Equal
}

/// Monomial orders used by the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Degree-compatible graded reverse lexicographic order.
    Grevlex,
    /// Block order eliminating the first `front` variables: compare the front block
    /// by grevlex, break ties by grevlex on the remaining variables.
    BlockElimination(usize),
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::BlockElimination(front) => {
                let (af, ar) = a.exps.split_at(front.min(a.nvars()));
                let (bf, br) = b.exps.split_at(front.min(b.nvars()));
                let daf: u32 = af.iter().sum();
                let dbf: u32 = bf.iter().sum();
                grevlex_slices(af, daf, bf, dbf)
                    .then_with(|| grevlex_slices(ar, a.degree - daf, br, b.degree - dbf))
            }
        }
    }
}

/// All monomials of exact degree `deg` in `nvars` variables, ascending in grevlex.
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    let mut exps = vec![0u32; nvars];
    fill_compositions(&mut exps, 0, deg, &mut out);
    out.sort();
    out
}

fn fill_compositions(exps: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == exps.len() {
        exps[pos] = remaining;
        out.push(Monomial::new(exps.to_vec()));
        return;
    }
    for e in 0..=remaining {
        exps[pos] = e;
        fill_compositions(exps, pos + 1, remaining - e, out);
    }
    exps[pos] = 0;
}

/// All monomials of degree `≤ deg`, ascending in grevlex.
pub fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Monomial> {
    (0..=deg).flat_map(|k| monomials_of_degree(nvars, k)).collect()
}

/// Number of monomials of degree `≤ deg` in `nvars` variables, `C(nvars + deg, deg)`.
pub fn count_up_to(nvars: usize, deg: u32) -> usize {
    let mut c: u128 = 1;
    for i in 1..=deg as u128 {
        c = c * (nvars as u128 + i) / i;
    }
    c as usize
}
