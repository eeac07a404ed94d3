//! Representation theory of the dual group: weight multiplicities by
//! Freudenthal's recursion, Levi branching, λ_b and the Chen–Zhu count.
//!
//! A coweight of G in ω-coordinates is a weight of Ĝ in fundamental-weight
//! coordinates. The simple roots of Ĝ are the simple coroots of G (Cartan
//! rows), and ρ̂ = ρ^∨ is the all-ones vector.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::affineweyl::{AffineElt, Frame};
use crate::error::{Error, Result};
use crate::linalg::{invert, rat, Rat};
use crate::rootdata::{FiniteWeylElt, RootSystem};
use crate::sigmaconj::{newton_kottwitz, BClass};

/// All weights of V_μ with their multiplicities.
#[derive(Clone, Debug, Serialize)]
pub struct WeightTable {
    pub highest: Vec<i64>,
    #[serde(serialize_with = "ser_mult")]
    pub mult: BTreeMap<Vec<i64>, u64>,
}

fn ser_mult<S: serde::Serializer>(m: &BTreeMap<Vec<i64>, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for (w, n) in m {
        seq.serialize_element(&(w, n))?;
    }
    seq.end()
}

impl WeightTable {
    pub fn get(&self, w: &[i64]) -> u64 {
        self.mult.get(w).copied().unwrap_or(0)
    }

    pub fn dimension(&self) -> u64 {
        self.mult.values().sum()
    }
}

fn reflect(rs: &RootSystem, i: usize, v: &[i64]) -> Vec<i64> {
    let c = v[i];
    v.iter().zip(&rs.cartan[i]).map(|(x, a)| x - c * a).collect()
}

/// Dominant W-conjugate of a weight.
pub fn dominant(rs: &RootSystem, v: &[i64]) -> Vec<i64> {
    let mut cur = v.to_vec();
    while let Some(i) = (0..cur.len()).find(|&i| cur[i] < 0) {
        cur = reflect(rs, i, &cur);
    }
    cur
}

/// Coordinates of v in the basis of simple coroots (Cartan rows).
fn coroot_coords(rs: &RootSystem, inv: &[Vec<Rat>], v: &[i64]) -> Vec<Rat> {
    (0..rs.rank).map(|j| v.iter().zip(inv).map(|(&x, row)| rat(x) * &row[j]).sum()).collect()
}

/// W-invariant form Σ_{α>0} ⟨x,α⟩⟨y,α⟩ on coweights.
fn form(rs: &RootSystem, x: &[i64], y: &[i64]) -> i64 {
    rs.pos_roots.iter().map(|a| RootSystem::pairing(a, x) * RootSystem::pairing(a, y)).sum()
}

fn form_rat(rs: &RootSystem, x: &[Rat], y: &[Rat]) -> Rat {
    rs.pos_roots.iter().map(|a| RootSystem::pairing_rat(a, x) * RootSystem::pairing_rat(a, y)).sum()
}

/// Weight table of V_μ by Freudenthal's formula.
pub fn weight_table(rs: &RootSystem, mu: &[i64]) -> WeightTable {
    let n = rs.rank;
    assert!(mu.iter().all(|&x| x >= 0), "highest weight must be dominant");
    if n == 0 {
        return WeightTable { highest: vec![], mult: BTreeMap::from([(vec![], 1)]) };
    }
    let cart: Vec<Vec<Rat>> = rs.cartan.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
    let inv = invert(&cart).expect("Cartan matrix is invertible");
    // Dominant weights below μ, reached by subtracting simple coroots.
    let below = |v: &[i64]| {
        let d: Vec<i64> = mu.iter().zip(v).map(|(a, b)| a - b).collect();
        coroot_coords(rs, &inv, &d).iter().all(|x| !x.is_negative())
    };
    let mut seen: HashSet<Vec<i64>> = HashSet::from([mu.to_vec()]);
    let mut queue = VecDeque::from([mu.to_vec()]);
    while let Some(v) = queue.pop_front() {
        for i in 0..n {
            let w: Vec<i64> = v.iter().zip(&rs.cartan[i]).map(|(x, a)| x - a).collect();
            if !seen.contains(&w) && below(&dominant(rs, &w)) {
                seen.insert(w.clone());
                queue.push_back(w);
            }
        }
    }
    let mut dom: Vec<(Rat, Vec<i64>)> = seen
        .iter()
        .filter(|v| v.iter().all(|&x| x >= 0))
        .map(|v| {
            let d: Vec<i64> = mu.iter().zip(v).map(|(a, b)| a - b).collect();
            (coroot_coords(rs, &inv, &d).into_iter().sum(), v.clone())
        })
        .collect();
    dom.sort();
    let rho = vec![1i64; n];
    let shifted = |v: &[i64]| -> Vec<i64> { v.iter().zip(&rho).map(|(a, b)| a + b).collect() };
    let top = form(rs, &shifted(mu), &shifted(mu));
    let mut dm: HashMap<Vec<i64>, i64> = HashMap::new();
    for (_, v) in &dom {
        if v == mu {
            dm.insert(v.clone(), 1);
            continue;
        }
        let mut acc = 0i64;
        for beta in &rs.pos_coroots {
            let mut k = 1;
            loop {
                let w: Vec<i64> = v.iter().zip(beta).map(|(x, b)| x + k * b).collect();
                let d = dominant(rs, &w);
                if !below(&d) {
                    break;
                }
                acc += dm.get(&d).copied().unwrap_or(0) * form(rs, &w, beta);
                k += 1;
            }
        }
        let denom = top - form(rs, &shifted(v), &shifted(v));
        assert!(denom > 0 && (2 * acc) % denom == 0, "Freudenthal recursion is not integral");
        dm.insert(v.clone(), 2 * acc / denom);
    }
    let mut mult = BTreeMap::new();
    for v in &seen {
        let m = dm[&dominant(rs, v)];
        if m > 0 {
            mult.insert(v.clone(), m as u64);
        }
    }
    WeightTable { highest: mu.to_vec(), mult }
}

pub fn weight_multiplicity(rs: &RootSystem, mu: &[i64], lam: &[i64]) -> u64 {
    weight_table(rs, mu).get(lam)
}

/// Weyl dimension formula for V_λ of the dual Levi with simple roots `levi`.
pub fn levi_dimension(rs: &RootSystem, lam: &[i64], levi: &[usize]) -> u64 {
    let two_rho_l = two_rho_levi(rs, levi);
    let mut num = rat(1);
    for a in levi_pos_roots(rs, levi) {
        let r = rat(RootSystem::pairing(a, &two_rho_l)) / rat(2);
        num *= (rat(RootSystem::pairing(a, lam)) + &r) / r;
    }
    assert!(num.is_integer(), "Weyl dimension is not integral");
    num.to_integer().to_u64().expect("dimension fits u64")
}

pub fn weyl_dimension(rs: &RootSystem, lam: &[i64]) -> u64 {
    levi_dimension(rs, lam, &(0..rs.rank).collect::<Vec<_>>())
}

fn levi_pos_roots<'a>(rs: &'a RootSystem, levi: &'a [usize]) -> impl Iterator<Item = &'a Vec<i64>> + 'a {
    rs.pos_roots.iter().filter(move |a| a.iter().enumerate().all(|(i, &c)| c == 0 || levi.contains(&i)))
}

/// 2ρ of the dual Levi: the sum of positive coroots in the span of `levi`.
fn two_rho_levi(rs: &RootSystem, levi: &[usize]) -> Vec<i64> {
    let mut out = vec![0i64; rs.rank];
    for (a, c) in rs.pos_roots.iter().zip(&rs.pos_coroots) {
        if a.iter().enumerate().all(|(i, &x)| x == 0 || levi.contains(&i)) {
            for (o, x) in out.iter_mut().zip(c) {
                *o += x;
            }
        }
    }
    out
}

/// Elements of W_L with their signs.
fn signed_parabolic(rs: &RootSystem, levi: &[usize]) -> Vec<(FiniteWeylElt, i64)> {
    let id = FiniteWeylElt::identity(rs.rank);
    let mut seen: HashMap<FiniteWeylElt, i64> = HashMap::from([(id.clone(), 1)]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        let sign = seen[&x];
        for &i in levi {
            let y = x.mul(&rs.simple_reflection(i));
            if !seen.contains_key(&y) {
                seen.insert(y.clone(), -sign);
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// a_{λ,μ}: multiplicity of V_λ^{M̂} in V_μ restricted to the dual Levi.
pub fn branching_multiplicity(rs: &RootSystem, mu: &[i64], lam: &[i64], levi: &[usize]) -> u64 {
    branching_with_table(rs, &weight_table(rs, mu), lam, levi)
}

pub fn branching_with_table(rs: &RootSystem, table: &WeightTable, lam: &[i64], levi: &[usize]) -> u64 {
    assert!(levi.iter().all(|&i| lam[i] >= 0), "λ must be dominant for the Levi");
    let two_rho_l = two_rho_levi(rs, levi);
    let mut acc = 0i64;
    for (w, sign) in signed_parabolic(rs, levi) {
        let moved = w.apply(&two_rho_l);
        let v: Vec<i64> = lam.iter().zip(two_rho_l.iter().zip(&moved)).map(|(l, (a, b))| l + (a - b) / 2).collect();
        acc += sign * table.get(&v) as i64;
    }
    assert!(acc >= 0, "negative branching multiplicity");
    acc as u64
}

/// λ_b as a point of X^*(Ŝ) ⊗ ℚ = (Λ ⊗ ℚ)^σ, with the data used to find it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaB {
    /// Finite simple roots of the Newton centralizer M.
    pub levi: Vec<usize>,
    /// Integral lift in Λ.
    pub lift: Vec<i64>,
    /// σ-average of the lift, the actual element of X^*(Ŝ).
    #[serde(serialize_with = "crate::repcalc::ser_rat_vec")]
    pub image: Vec<Rat>,
}

pub(crate) fn ser_rat_vec<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    serde::Serialize::serialize(&strs, s)
}

pub fn sigma_average(f: &Frame, lam: &[i64]) -> Vec<Rat> {
    let mut orbit = vec![lam.to_vec()];
    loop {
        let next = f.frob.permute_coweight(orbit.last().expect("nonempty"));
        if next == lam {
            break;
        }
        orbit.push(next);
    }
    let k = rat(orbit.len() as i64);
    (0..lam.len()).map(|i| orbit.iter().map(|v| rat(v[i])).sum::<Rat>() / &k).collect()
}

/// A σ-conjugate t^λ u of the representative of b with ν = ν̄ dominant.
pub fn dominant_newton_rep(f: &Frame, b: &BClass) -> Result<AffineElt> {
    for v in f.g().weyl_elements()? {
        let x = f.twisted_conj(&AffineElt::finite(v.clone()), b.rep());
        if newton_kottwitz(f, &x).nu == b.newton {
            if x.u.apply_rat(&b.newton) != b.newton {
                return Err(Error::CrossCheckMismatch("finite part does not centralize the Newton point".into()));
            }
            return Ok(x);
        }
    }
    Err(Error::CrossCheckMismatch("no finite conjugate has dominant Newton point".into()))
}

pub fn newton_levi(b: &BClass) -> Vec<usize> {
    (0..b.newton.len()).filter(|&i| b.newton[i].is_zero()).collect()
}

/// Best integral approximation of ν̄_b inside the class κ_M(b): the lift whose
/// σ-average is closest to ν̄_b for the invariant form.
pub fn lambda_b(f: &Frame, b: &BClass) -> Result<LambdaB> {
    let rs = &f.g().roots;
    let levi = newton_levi(b);
    let x = dominant_newton_rep(f, b)?;
    let mut base = x.lam.clone();
    // M-dominant and M-minimal in its Q^∨_M coset.
    loop {
        if let Some(&i) = levi.iter().find(|&&i| base[i] < 0) {
            base = reflect(rs, i, &base);
            continue;
        }
        let drop = rs
            .pos_roots
            .iter()
            .zip(&rs.pos_coroots)
            .find(|(a, _)| a.iter().enumerate().all(|(i, &x)| x == 0 || levi.contains(&i)) && RootSystem::pairing(a, &base) >= 2)
            .map(|(_, c)| c.clone());
        match drop {
            Some(c) => base = base.iter().zip(&c).map(|(x, y)| x - y).collect(),
            None => break,
        }
    }
    const WINDOW: i64 = 2;
    let mut best: Option<(Rat, Vec<Rat>, Vec<i64>)> = None;
    let mut coeffs = vec![-WINDOW; levi.len()];
    loop {
        let mut lift = base.clone();
        for (c, &i) in coeffs.iter().zip(&levi) {
            for (l, a) in lift.iter_mut().zip(&rs.cartan[i]) {
                *l += c * a;
            }
        }
        let image = sigma_average(f, &lift);
        let diff: Vec<Rat> = image.iter().zip(&b.newton).map(|(a, c)| a - c).collect();
        let d = form_rat(rs, &diff, &diff);
        let better = match &best {
            None => true,
            Some((bd, bi, _)) => d < *bd || (d == *bd && image > *bi),
        };
        if better {
            best = Some((d, image, lift));
        }
        let Some(k) = coeffs.iter().position(|&c| c < WINDOW) else { break };
        coeffs[k] += 1;
        for c in &mut coeffs[..k] {
            *c = -WINDOW;
        }
    }
    let (_, image, lift) = best.expect("window is nonempty");
    Ok(LambdaB { levi, lift, image })
}

/// dim V_μ(λ_b), summing over the weights of V_μ lying over λ_b in X^*(Ŝ).
pub fn chen_zhu_count(f: &Frame, mu: &[i64], b: &BClass) -> Result<u64> {
    let lb = lambda_b(f, b)?;
    let table = weight_table(&f.g().roots, mu);
    Ok(table.mult.iter().filter(|(w, _)| sigma_average(f, w) == lb.image).map(|(_, m)| m).sum())
}
