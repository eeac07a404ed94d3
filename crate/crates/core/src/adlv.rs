//! Affine Deligne–Lusztig varieties X_μ(b): nonemptiness, dimension, defect,
//! and the J_b-orbits of top-dimensional components with their stabilizers.
//!
//! Basic classes go through the Iwahori-level pipeline on w_0 t^μ. Non-basic
//! classes are reduced to the Newton centralizer M, realized as the adjoint
//! datum of its derived group.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::affineweyl::{AffineElt, Frame};
use crate::classpoly::{Engine, Stabilizer, Strategy};
use crate::error::{Error, Result};
use crate::linalg::{fixed_dim, rat, IntLattice, Rat};
use crate::parahoric::{
    eval_vol, is_finite_type, is_sigma_stable, is_very_special_parahoric, stable_finite_subsets,
    volume_and_logvolume, ParahoricDescriptor,
};
use crate::repcalc::{branching_with_table, chen_zhu_count, dominant_newton_rep, newton_levi, weight_table};
use crate::rootdata::{dominance_leq, rho_pairing, GroupDatum, RootSystem};
use crate::sigmaconj::{enumerate_b_g_mu, mu_diamond, mu_natural, newton_kottwitz, BClass};

/// Exact rational, serialized as {num, den}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatJson(pub Rat);

impl Serialize for RatJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        fn int(x: &BigInt) -> serde_json::Value {
            x.to_i64().map_or_else(|| serde_json::Value::String(x.to_string()), serde_json::Value::from)
        }
        let mut st = s.serialize_struct("Rat", 2)?;
        st.serialize_field("num", &int(self.0.numer()))?;
        st.serialize_field("den", &int(self.0.denom()))?;
        st.end()
    }
}

pub fn rat_json(v: &[Rat]) -> Vec<RatJson> {
    v.iter().cloned().map(RatJson).collect()
}

/// def_G(b) = dim V^σ − dim V^{Ad(b)σ} on Λ ⊗ ℚ.
pub fn defect(f: &Frame, b: &BClass) -> usize {
    defect_of(f, b.rep())
}

fn defect_of(f: &Frame, w: &AffineElt) -> usize {
    let p = f.frob.linear_matrix();
    let u = w.u.matrix();
    let n = p.len();
    let up: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| u[i][k] * p[k][j]).sum()).collect()).collect();
    fixed_dim(&p) - fixed_dim(&up)
}

/// Whether b ∈ B(G, μ), and ⟨μ − ν̄_b, ρ⟩ − ½ def(b) when it is.
pub fn nonempty_and_dimension(f: &Frame, mu: &[i64], b: &BClass) -> Result<(bool, Option<i64>)> {
    let g = f.g();
    let nonempty = b.kappa == mu_natural(f, mu) && dominance_leq(g, &b.newton, &mu_diamond(f, mu));
    if !nonempty {
        return Ok((false, None));
    }
    let diff: Vec<Rat> = mu.iter().zip(&b.newton).map(|(&m, n)| rat(m) - n).collect();
    let d = rho_pairing(g, &diff) - rat(defect(f, b) as i64) / rat(2);
    if !d.is_integer() || d < rat(0) {
        return Err(Error::ParityViolation(format!("dimension formula gives {d}")));
    }
    Ok((true, Some(d.to_integer().to_i64().expect("small dimension"))))
}

/// (ν̄, κ) of every class met by some X_w(b) with w ∈ W_0 t^μ W_0, read off
/// from the class polynomials.
pub fn pipeline_classes(engine: &Engine, mu: &[i64]) -> Result<BTreeSet<(Vec<Rat>, usize)>> {
    let f = &engine.frame;
    let g = f.g();
    let t = AffineElt::translation(mu.to_vec());
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    for u in g.weyl_elements()? {
        for v in g.weyl_elements()? {
            let w = AffineElt::finite(u.clone()).mul(&t).mul(&AffineElt::finite(v.clone()));
            if !seen.insert(w.clone()) {
                continue;
            }
            for key in engine.class_polynomials(&w)?.keys() {
                let nk = newton_kottwitz(f, &key.rep);
                out.insert((nk.newton, nk.kappa));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeviDatum {
    pub levi_simple_roots: Vec<usize>,
    /// M-dominant, in ω-coordinates of G.
    pub lambda: Vec<i64>,
    pub branching_mult: u64,
}

/// The λ ∈ I_{μ,b,M} with a_{λ,μ} ≠ 0, M the centralizer of ν̄_b.
pub fn levi_targets(f: &Frame, mu: &[i64], b: &BClass) -> Result<Vec<LeviDatum>> {
    if b.basic {
        return Ok(Vec::new());
    }
    let g = f.g();
    let rs = &g.roots;
    let levi = newton_levi(b);
    let kappa_m = dominant_newton_rep(f, b)?.lam;
    // κ_M lives in Λ / (Q^∨_M + (1 − σ)Λ).
    let p = f.frob.linear_matrix();
    let n = g.rank();
    let mut gens: Vec<Vec<i64>> = levi.iter().map(|&i| rs.cartan[i].clone()).collect();
    for row in &g.lattice_basis {
        let moved: Vec<i64> = (0..n).map(|i| (0..n).map(|k| p[i][k] * row[k]).sum()).collect();
        gens.push(row.iter().zip(&moved).map(|(a, b)| a - b).collect());
    }
    let rel = IntLattice::from_generators(n, &gens);
    let table = weight_table(rs, mu);
    let mut out = Vec::new();
    for lam in table.mult.keys() {
        if levi.iter().any(|&i| lam[i] < 0) {
            continue;
        }
        let d: Vec<i64> = lam.iter().zip(&kappa_m).map(|(a, b)| a - b).collect();
        if !rel.contains(&d) {
            continue;
        }
        let a = branching_with_table(rs, &table, lam, &levi);
        if a > 0 {
            out.push(LeviDatum { levi_simple_roots: levi.clone(), lambda: lam.clone(), branching_mult: a });
        }
    }
    Ok(out)
}

/// A stabilizer, as a standard parahoric in the Iwahori–Weyl frame of J_b.
#[derive(Clone, Debug)]
pub struct StabilizerEntry {
    pub descriptor: ParahoricDescriptor,
    /// Frame of J_b on the datum holding the descriptor: G itself for basic
    /// b, the adjoint Levi datum otherwise.
    pub frame: Frame,
    pub very_special: bool,
}

impl StabilizerEntry {
    fn new(group: Arc<GroupDatum>, descriptor: ParahoricDescriptor) -> Result<Self> {
        let frame = Frame::new(group, descriptor.frob.clone())?;
        let descriptor = ParahoricDescriptor { k: canonical_k(&frame, &descriptor.k), frob: descriptor.frob };
        let k = &descriptor.k;
        if !is_finite_type(frame.g(), k) || !is_sigma_stable(&frame, k) {
            return Err(Error::CrossCheckMismatch(format!("stabilizer {k:?} is not a stable finite-type subset")));
        }
        let very_special = is_very_special_parahoric(&frame, k);
        Ok(StabilizerEntry { descriptor, frame, very_special })
    }
}

/// Least K in its orbit under the τ ∈ Ω commuting with σ_b. Such τ lie in
/// J_b, so the parahoric is only defined up to this conjugation.
fn canonical_k(frame: &Frame, k: &[usize]) -> Vec<usize> {
    let g = frame.g();
    let conj = |t: &AffineElt, i: usize| {
        let x = t.mul(&g.simple[i].elt).mul(&t.inverse());
        g.simple_index(&x).expect("Ω permutes the simple reflections")
    };
    let sigma_node = |i: usize| g.simple_index(&frame.sigma(&g.simple[i].elt)).expect("σ permutes the simple reflections");
    let mut best = k.to_vec();
    for t in &g.omega {
        if (0..g.num_simple()).all(|i| conj(t, sigma_node(i)) == sigma_node(conj(t, i))) {
            let mut image: Vec<usize> = k.iter().map(|&i| conj(t, i)).collect();
            image.sort();
            best = best.min(image);
        }
    }
    best
}

impl Serialize for StabilizerEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g = self.frame.g();
        let mut st = s.serialize_struct("Stabilizer", 4)?;
        st.serialize_field("group", &g.name)?;
        st.serialize_field("K", &self.descriptor.k)?;
        st.serialize_field("twist", g.omega_name(self.descriptor.frob.twist_index))?;
        st.serialize_field("very_special", &self.very_special)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QCheck {
    pub q: u64,
    #[serde(rename = "Q")]
    pub q_value: RatJson,
    pub vol_very_special: RatJson,
    pub product: RatJson,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdlvReport {
    /// μ in Λ-basis coordinates.
    pub mu: Vec<i64>,
    pub b: String,
    pub newton: Vec<RatJson>,
    pub kappa: String,
    pub basic: bool,
    pub nonempty: bool,
    pub dim: Option<i64>,
    /// Dimension found by the Iwahori-level pipeline or the Levi route.
    pub dim_pipeline: Option<i64>,
    pub defect: usize,
    pub orbit_count: u64,
    pub chen_zhu: Option<u64>,
    pub stabilizers: Vec<StabilizerEntry>,
    pub all_very_special: bool,
    pub levi: Vec<LeviDatum>,
    pub q_check: Vec<QCheck>,
}

impl AdlvReport {
    fn empty(f: &Frame, mu: &[i64], b: &BClass) -> Self {
        let g = f.g();
        AdlvReport {
            mu: g.to_basis_coords(mu).unwrap_or_else(|| mu.to_vec()),
            b: b.key.to_text(g),
            newton: rat_json(&b.newton),
            kappa: g.omega_name(b.kappa).to_string(),
            basic: b.basic,
            nonempty: false,
            dim: None,
            dim_pipeline: None,
            defect: defect(f, b),
            orbit_count: 0,
            chen_zhu: None,
            stabilizers: Vec::new(),
            all_very_special: true,
            levi: Vec::new(),
            q_check: Vec::new(),
        }
    }
}

/// w_0 t^μ, the longest element of W_0 t^μ W_0.
pub fn w0_t_mu(g: &GroupDatum, mu: &[i64]) -> Result<AffineElt> {
    let all: Vec<usize> = (0..g.rank()).collect();
    let w0 = g.roots.longest_in(&all);
    let w = AffineElt::new(w0.apply(mu), w0.clone());
    let expect = RootSystem::pairing(&g.roots.two_rho, mu) as usize + g.roots.length(&w0);
    if crate::affineweyl::length(g, &w) != expect {
        return Err(Error::CrossCheckMismatch("w0 t^mu is not longest in its double coset".into()));
    }
    Ok(w)
}

/// Top components of X_μ(b) up to J_b: orbit count, stabilizers, dimension.
/// `chen_zhu` turns on the λ_b calibration gate (unramified frames only).
pub fn top_components(engine: &Engine, mu: &[i64], b: &BClass, chen_zhu: bool) -> Result<AdlvReport> {
    let f = &engine.frame;
    let g = f.g();
    let mut report = AdlvReport::empty(f, mu, b);
    let (nonempty, dim) = nonempty_and_dimension(f, mu, b)?;
    if !nonempty {
        return Ok(report);
    }
    report.nonempty = true;
    report.dim = dim;
    let dim = dim.expect("nonempty");
    if b.basic {
        let w = w0_t_mu(g, mu)?;
        let tic = engine.sigma_top(&w, b)?;
        let l0 = g.roots.length(&g.roots.longest_in(&(0..g.rank()).collect::<Vec<_>>())) as i64;
        if tic.is_zero() || tic.dim - l0 != dim {
            return Err(Error::CrossCheckMismatch(format!(
                "pipeline dimension {} differs from the closed formula {dim}",
                tic.dim - l0
            )));
        }
        report.dim_pipeline = Some(tic.dim - l0);
        for (orbit, &n) in &tic.orbits {
            let Stabilizer::Parahoric(desc) = &orbit.stabilizer else {
                return Err(Error::CrossCheckMismatch("basic orbit without a parahoric stabilizer".into()));
            };
            let entry = StabilizerEntry::new(f.group.clone(), desc.clone())?;
            for _ in 0..n {
                report.stabilizers.push(entry.clone());
            }
        }
    } else {
        let levi = newton_levi(b);
        let (m_ad, order) = g.levi_adjoint(&levi)?;
        let m_engine = Engine::new(Frame::standard(Arc::new(m_ad))?, Strategy::Deterministic).with_budget(engine.budget);
        let rho_m = two_rho_levi_roots(&g.roots, &levi);
        report.levi = levi_targets(f, mu, b)?;
        for t in &report.levi {
            let lam_ad: Vec<i64> = order.iter().map(|&i| t.lambda[i]).collect();
            let mf = &m_engine.frame;
            let classes = enumerate_b_g_mu(mf, &lam_ad, engine.budget)?;
            let mb = classes.iter().find(|c| c.basic).expect("B(M, λ) has a basic class");
            let sub = top_components(&m_engine, &lam_ad, mb, false)?;
            let sub_dim = sub.dim.ok_or_else(|| Error::CrossCheckMismatch("empty Levi variety".into()))?;
            // dim X^M_λ(b) + ⟨μ+λ, ρ⟩ − 2⟨λ, ρ_M⟩ − 2⟨ν̄, ρ_N⟩.
            let mu_lam: Vec<i64> = mu.iter().zip(&t.lambda).map(|(a, c)| a + c).collect();
            let two_rho_n: Vec<i64> = g.roots.two_rho.iter().zip(&rho_m).map(|(a, c)| a - c).collect();
            let lifted = rat(sub_dim) + rat(RootSystem::pairing(&g.roots.two_rho, &mu_lam)) / rat(2)
                - rat(RootSystem::pairing(&rho_m, &t.lambda))
                - RootSystem::pairing_rat(&two_rho_n, &b.newton);
            if lifted != rat(dim) {
                return Err(Error::CrossCheckMismatch(format!(
                    "Levi route gives dimension {lifted} for lambda {:?}, closed formula {dim}",
                    t.lambda
                )));
            }
            report.dim_pipeline = Some(dim);
            for s in &sub.stabilizers {
                for _ in 0..t.branching_mult {
                    report.stabilizers.push(s.clone());
                }
            }
        }
    }
    if report.stabilizers.is_empty() {
        return Err(Error::CrossCheckMismatch(format!("no top components found for nonempty {}", report.b)));
    }
    report.orbit_count = report.stabilizers.len() as u64;
    report.all_very_special = report.stabilizers.iter().all(|s| s.very_special);
    if chen_zhu {
        let cz = chen_zhu_count(f, mu, b)?;
        report.chen_zhu = Some(cz);
        if cz != report.orbit_count {
            return Err(Error::ConventionUnverified(format!(
                "dim V_mu(lambda_b) = {cz} but the pipeline finds {} orbits for {}",
                report.orbit_count, report.b
            )));
        }
    }
    Ok(report)
}

/// Sum of positive roots of the Levi, simple-root coordinates.
fn two_rho_levi_roots(rs: &RootSystem, levi: &[usize]) -> Vec<i64> {
    let mut out = vec![0i64; rs.rank];
    for a in &rs.pos_roots {
        if a.iter().enumerate().all(|(i, &x)| x == 0 || levi.contains(&i)) {
            for (o, x) in out.iter_mut().zip(a) {
                *o += x;
            }
        }
    }
    out
}

fn vol_at(frame: &Frame, k: &[usize], q: u64) -> Result<BigUint> {
    Ok(eval_vol(&volume_and_logvolume(frame, k)?.0, q))
}

/// Q(μ,b) = 𝒩^{-1} Σ vol(stabilizer)^{-1} against the very special volume,
/// with Iwahori-normalized volumes on J_b.
pub fn q_check(report: &AdlvReport, q: u64) -> Result<QCheck> {
    let Some(first) = report.stabilizers.first() else {
        return Err(Error::CrossCheckMismatch("no orbits to average over".into()));
    };
    let frame = &first.frame;
    let to_rat = |x: BigUint| Rat::from_integer(BigInt::from(x));
    let mut sum = rat(0);
    for s in &report.stabilizers {
        sum += rat(1) / to_rat(vol_at(&s.frame, &s.descriptor.k, q)?);
    }
    let q_value = sum / rat(report.stabilizers.len() as i64);
    let mut vs_vols = BTreeSet::new();
    for k in stable_finite_subsets(frame) {
        if is_very_special_parahoric(frame, &k) {
            vs_vols.insert(vol_at(frame, &k, q)?);
        }
    }
    if vs_vols.len() != 1 {
        return Err(Error::IdentityViolation(format!("very special volumes are not unique: {vs_vols:?}")));
    }
    let vol = to_rat(vs_vols.into_iter().next().expect("one volume"));
    let product = &q_value * &vol;
    Ok(QCheck {
        q,
        holds: product == rat(1),
        q_value: RatJson(q_value),
        vol_very_special: RatJson(vol),
        product: RatJson(product),
    })
}

/// Like `q_check`, but a failed identity is an error.
pub fn q_invariant(report: &AdlvReport, q: u64) -> Result<QCheck> {
    let c = q_check(report, q)?;
    if !c.holds {
        return Err(Error::IdentityViolation(format!("Q * vol = {} at q = {q}", c.product.0)));
    }
    Ok(c)
}

/// Runs the pipeline for every b ∈ B(G, μ) and records the Q identity on
/// basic classes. A stabilizer that is not very special shows up as `all_very_special == false`.
pub fn verify_theorem_a(engine: &Engine, mu: &[i64], qs: &[u64]) -> Result<Vec<AdlvReport>> {
    let mut out = Vec::new();
    for b in enumerate_b_g_mu(&engine.frame, mu, engine.budget)? {
        let mut r = top_components(engine, mu, &b, true)?;
        if b.basic {
            for &q in qs {
                r.q_check.push(q_check(&r, q)?);
            }
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::sigmaconj::DEFAULT_BUDGET;

    fn engine(name: &str) -> Engine {
        Engine::new(Frame::standard(Arc::new(presets::load(name).unwrap())).unwrap(), Strategy::Deterministic)
    }

    fn classes(e: &Engine, mu: &[i64]) -> Vec<BClass> {
        enumerate_b_g_mu(&e.frame, mu, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn defect_examples() {
        let e = engine("pgl2");
        let f = &e.frame;
        let cs = classes(&e, &[2]);
        let basic = cs.iter().find(|c| c.basic).unwrap();
        let ord = cs.iter().find(|c| !c.basic).unwrap();
        assert_eq!(defect(f, basic), 0);
        assert_eq!(defect(f, ord), 0);
        let cs = classes(&e, &[1]);
        let basic = cs.iter().find(|c| c.basic).unwrap();
        assert_eq!(defect(f, basic), 1);
    }

    #[test]
    fn rank_one_dimensions() {
        let e = engine("pgl2");
        let f = &e.frame;
        for c in classes(&e, &[2]) {
            let (ne, d) = nonempty_and_dimension(f, &[2], &c).unwrap();
            assert!(ne);
            assert_eq!(d, Some(if c.basic { 1 } else { 0 }));
        }
        let cs = classes(&e, &[1]);
        let basic = cs.iter().find(|c| c.basic).unwrap();
        assert_eq!(nonempty_and_dimension(f, &[1], basic).unwrap(), (true, Some(0)));
        let ord = classes(&e, &[2]).into_iter().find(|c| !c.basic).unwrap();
        assert_eq!(nonempty_and_dimension(f, &[1], &ord).unwrap(), (false, None));
    }

    #[test]
    fn rank_one_top_components() {
        let e = engine("pgl2");
        for c in classes(&e, &[2]) {
            let r = top_components(&e, &[2], &c, true).unwrap();
            assert_eq!(r.orbit_count, 1);
            assert!(r.all_very_special);
            if c.basic {
                assert_eq!(r.dim, Some(1));
                // {s_1} and {s_0} are τ-conjugate; the canonical choice is {s_0}.
                assert_eq!(r.stabilizers[0].descriptor.k, vec![0]);
                let q = q_invariant(&r, 2).unwrap();
                assert_eq!(q.q_value.0, Rat::new(1.into(), 3.into()));
            } else {
                assert_eq!(r.dim, Some(0));
                assert_eq!(r.levi, vec![LeviDatum { levi_simple_roots: vec![], lambda: vec![2], branching_mult: 1 }]);
            }
        }
        let basic = classes(&e, &[1]).into_iter().find(|c| c.basic).unwrap();
        let r = top_components(&e, &[1], &basic, true).unwrap();
        assert_eq!((r.orbit_count, r.dim), (1, Some(0)));
        assert!(r.stabilizers[0].very_special);
    }

    #[test]
    fn pipeline_nonemptiness_rank_one() {
        let e = engine("pgl2");
        for mu in [[1], [2], [3]] {
            let pipe = pipeline_classes(&e, &mu).unwrap();
            let closed: BTreeSet<_> = classes(&e, &mu).into_iter().map(|c| (c.newton, c.kappa)).collect();
            assert_eq!(pipe, closed);
        }
    }

    #[test]
    fn theorem_a_small_cases() {
        for (name, mu) in [("pgl2", vec![4]), ("pgl3", vec![1, 1]), ("psp4", vec![0, 1]), ("pgl4_flip", vec![1, 0, 1])] {
            let e = engine(name);
            let reports = verify_theorem_a(&e, &mu, &[2, 3]).unwrap();
            for r in &reports {
                assert!(r.all_very_special, "{name} {mu:?} {}", r.b);
                assert!(r.q_check.iter().all(|c| c.holds));
            }
        }
    }
}
