//! Standard parahorics of a Frobenius-twisted Iwahori–Weyl group: the relative
//! local Dynkin diagram, special and very special vertices, and volumes.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::affineweyl::{AffineElt, Frame, FrobeniusAction};
use crate::error::{Error, Result};
use crate::linalg::{fixed_space, Rat};
use crate::rootdata::{FiniteWeylElt, GroupDatum};

/// A σ_b-stable subset K of S̆, standing for a standard parahoric.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParahoricDescriptor {
    pub k: Vec<usize>,
    pub frob: FrobeniusAction,
}

/// W̆_K is finite iff K omits at least one node of every affine component.
pub fn is_finite_type(g: &GroupDatum, k: &[usize]) -> bool {
    g.components.iter().all(|c| {
        let all = std::iter::once(c.affine_index).chain((0..c.nodes.len()).map(|i| c.affine_index + 1 + i));
        all.into_iter().any(|i| !k.contains(&i))
    })
}

/// Elements of the finite group W̆_K.
pub fn parabolic_elements(g: &GroupDatum, k: &[usize]) -> Result<Vec<AffineElt>> {
    if !is_finite_type(g, k) {
        return Err(Error::InfiniteType(format!("{k:?}")));
    }
    let mut seen: HashSet<AffineElt> = HashSet::new();
    let id = AffineElt::identity(g.rank());
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for &i in k {
            let y = x.mul(&g.simple[i].elt);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut v: Vec<AffineElt> = seen.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Longest element of the finite group W̆_K.
pub fn longest_element(g: &GroupDatum, k: &[usize]) -> Result<AffineElt> {
    if !is_finite_type(g, k) {
        return Err(Error::InfiniteType(format!("{k:?}")));
    }
    let mut cur = AffineElt::identity(g.rank());
    let mut len = 0;
    loop {
        let next = k.iter().map(|&i| cur.mul(&g.simple[i].elt)).find(|y| crate::affineweyl::length(g, y) > len);
        match next {
            Some(y) => {
                cur = y;
                len += 1;
            }
            None => return Ok(cur),
        }
    }
}

/// Order of the group generated by `gens` acting on the span of `basis`.
fn restricted_order(gens: &[FiniteWeylElt], basis: &[Vec<Rat>], n: usize) -> usize {
    let key = |x: &FiniteWeylElt| -> Vec<Vec<Rat>> { basis.iter().map(|b| x.apply_rat(b)).collect() };
    let id = FiniteWeylElt::identity(n);
    let mut seen: HashSet<FiniteWeylElt> = HashSet::from([id.clone()]);
    let mut images: HashSet<Vec<Vec<Rat>>> = HashSet::from([key(&id)]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = x.mul(s);
            if seen.insert(y.clone()) {
                images.insert(key(&y));
                queue.push_back(y);
            }
        }
    }
    images.len()
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// σ_b-orbit C_v ⊆ S̆.
    pub orbit: Vec<usize>,
    pub d: usize,
    /// s_v, the longest element of W̆_{C_v}.
    pub longest: AffineElt,
}

#[derive(Clone, Debug)]
pub struct RelativeDiagram {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    /// Connected components as lists of vertex indices.
    pub components: Vec<Vec<usize>>,
}

pub fn sigma_orbits(frame: &Frame) -> Vec<Vec<usize>> {
    let n = frame.g().num_simple();
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if done[i] {
            continue;
        }
        let mut orbit = vec![i];
        done[i] = true;
        let mut j = frame.sperm[i];
        while j != i {
            orbit.push(j);
            done[j] = true;
            j = frame.sperm[j];
        }
        orbit.sort();
        out.push(orbit);
    }
    out
}

pub fn relative_diagram(frame: &Frame) -> RelativeDiagram {
    let g = frame.g();
    let vertices: Vec<Vertex> = sigma_orbits(frame)
        .into_iter()
        .filter(|o| is_finite_type(g, o))
        .map(|orbit| {
            let longest = longest_element(g, &orbit).expect("finite orbit");
            Vertex { d: frame.length(&longest), orbit, longest }
        })
        .collect();
    let nv = vertices.len();
    let mut edges = Vec::new();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..nv {
        for b in a + 1..nv {
            let (x, y) = (&vertices[a].longest, &vertices[b].longest);
            if x.mul(y) != y.mul(x) {
                edges.push((a, b));
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    for v in 0..nv {
        let r = find(&mut parent, v);
        match components.iter_mut().find(|c| find(&mut parent.clone(), c[0]) == r) {
            Some(c) => c.push(v),
            None => components.push(vec![v]),
        }
    }
    RelativeDiagram { vertices, edges, components }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexFlags {
    pub special: bool,
    pub very_special: bool,
}

/// A vertex is special when the other vertices of its component already
/// generate the whole linear part of the relative affine Weyl group, acting
/// on the σ-fixed apartment.
pub fn vertex_flags(frame: &Frame, d: &RelativeDiagram) -> Vec<VertexFlags> {
    let n = frame.g().rank();
    let apartment = fixed_space(&frame.frob.linear_matrix());
    let mut special = vec![false; d.vertices.len()];
    for comp in &d.components {
        let all: Vec<FiniteWeylElt> = comp.iter().map(|&v| d.vertices[v].longest.u.clone()).collect();
        let full = restricted_order(&all, &apartment, n);
        for &v in comp {
            let others: Vec<FiniteWeylElt> =
                comp.iter().filter(|&&x| x != v).map(|&x| d.vertices[x].longest.u.clone()).collect();
            special[v] = restricted_order(&others, &apartment, n) == full;
        }
    }
    let mut flags: Vec<VertexFlags> = special.iter().map(|&s| VertexFlags { special: s, very_special: false }).collect();
    for comp in &d.components {
        let min_d = comp.iter().filter(|&&v| special[v]).map(|&v| d.vertices[v].d).min();
        for &v in comp {
            flags[v].very_special = special[v] && Some(d.vertices[v].d) == min_d;
        }
    }
    flags
}

/// Volume polynomial Σ_{w ∈ W̆_K^σ} q^{ℓ(w)} (coefficients by degree) and ℓ(w_K).
pub fn volume_and_logvolume(frame: &Frame, k: &[usize]) -> Result<(Vec<u64>, usize)> {
    let g = frame.g();
    let elts = parabolic_elements(g, k)?;
    let mut vol: Vec<u64> = Vec::new();
    let mut logvol = 0;
    for w in &elts {
        let l = frame.length(w);
        logvol = logvol.max(l);
        if frame.sigma(w) == *w {
            if vol.len() <= l {
                vol.resize(l + 1, 0);
            }
            vol[l] += 1;
        }
    }
    Ok((vol, logvol))
}

pub fn eval_vol(vol: &[u64], q: u64) -> num_bigint::BigUint {
    vol.iter().rev().fold(num_bigint::BigUint::from(0u32), |acc, &c| acc * q + c)
}

pub fn is_sigma_stable(frame: &Frame, k: &[usize]) -> bool {
    k.iter().all(|&i| k.contains(&frame.sperm[i]))
}

/// K is very special iff, in every component of the relative diagram, the
/// vertices not contained in K form a single very special vertex.
pub fn is_very_special_parahoric(frame: &Frame, k: &[usize]) -> bool {
    let g = frame.g();
    if !is_finite_type(g, k) || !is_sigma_stable(frame, k) {
        return false;
    }
    let d = relative_diagram(frame);
    let flags = vertex_flags(frame, &d);
    d.components.iter().all(|comp| {
        let outside: Vec<usize> =
            comp.iter().copied().filter(|&v| !d.vertices[v].orbit.iter().all(|i| k.contains(i))).collect();
        outside.len() == 1 && flags[outside[0]].very_special
    })
}

/// All σ-stable finite-type subsets of S̆, as unions of σ-orbits.
pub fn stable_finite_subsets(frame: &Frame) -> Vec<Vec<usize>> {
    let orbits = sigma_orbits(frame);
    let g = frame.g();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << orbits.len()) {
        let mut k: Vec<usize> =
            (0..orbits.len()).filter(|b| mask >> b & 1 == 1).flat_map(|b| orbits[b].iter().copied()).collect();
        k.sort();
        if is_finite_type(g, &k) {
            out.push(k);
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ArgmaxFlags {
    pub vol: Vec<bool>,
    pub logvol: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop36Entry {
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub vol_coeffs: Vec<u64>,
    pub logvol: usize,
    pub very_special: bool,
    pub argmax_flags: ArgmaxFlags,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop36Report {
    pub q_values: Vec<u64>,
    pub entries: Vec<Prop36Entry>,
    pub violations: Vec<String>,
}

impl Prop36Report {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks {very special} = argmax vol(q) for each q = argmax logvol over all
/// σ-stable finite-type K.
pub fn verify_prop36(frame: &Frame, q_values: &[u64]) -> Result<Prop36Report> {
    let subsets = stable_finite_subsets(frame);
    let mut data = Vec::new();
    for k in &subsets {
        let (vol, logvol) = volume_and_logvolume(frame, k)?;
        data.push((k.clone(), vol, logvol, is_very_special_parahoric(frame, k)));
    }
    let max_log = data.iter().map(|d| d.2).max().unwrap_or(0);
    let max_vol: Vec<num_bigint::BigUint> = q_values
        .iter()
        .map(|&q| data.iter().map(|d| eval_vol(&d.1, q)).max().unwrap_or_default())
        .collect();
    let mut violations = Vec::new();
    let mut entries = Vec::new();
    for (k, vol, logvol, vs) in data {
        let vol_flags: Vec<bool> = q_values.iter().zip(&max_vol).map(|(&q, m)| eval_vol(&vol, q) == *m).collect();
        let log_flag = logvol == max_log;
        for (q, &f) in q_values.iter().zip(&vol_flags) {
            if f != vs {
                violations.push(format!("K={k:?}: very_special={vs} but argmax vol(q={q}) is {f}"));
            }
        }
        if log_flag != vs {
            violations.push(format!("K={k:?}: very_special={vs} but argmax logvol is {log_flag}"));
        }
        entries.push(Prop36Entry {
            k,
            vol_coeffs: vol,
            logvol,
            very_special: vs,
            argmax_flags: ArgmaxFlags { vol: vol_flags, logvol: log_flag },
        });
    }
    Ok(Prop36Report { q_values: q_values.to_vec(), entries, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use std::collections::HashMap;
    use std::sync::Arc;

    fn frame(name: &str) -> Frame {
        Frame::standard(Arc::new(presets::load(name).unwrap())).unwrap()
    }

    #[test]
    fn diagrams() {
        let f = frame("pgl2");
        let d = relative_diagram(&f);
        assert_eq!(d.vertices.iter().map(|v| v.d).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!(d.edges, vec![(0, 1)]);
        assert_eq!(d.components.len(), 1);
        let flags = vertex_flags(&f, &d);
        assert!(flags.iter().all(|x| x.special && x.very_special));

        let f = frame("pgl4_flip");
        let d = relative_diagram(&f);
        let orbits: Vec<_> = d.vertices.iter().map(|v| v.orbit.clone()).collect();
        assert_eq!(orbits, vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(d.vertices.iter().map(|v| v.d).collect::<Vec<_>>(), vec![1, 2, 1]);
        let flags = vertex_flags(&f, &d);
        assert_eq!(flags.iter().map(|x| x.special).collect::<Vec<_>>(), vec![true, false, true]);

        let f = frame("g2");
        let d = relative_diagram(&f);
        assert_eq!(d.vertices.iter().map(|v| v.d).collect::<Vec<_>>(), vec![1, 1, 1]);

        let f = frame("psp4");
        let flags = vertex_flags(&f, &relative_diagram(&f));
        assert_eq!(flags.iter().map(|x| x.special).collect::<Vec<_>>(), vec![true, false, true]);
        assert!(flags[0].very_special && flags[2].very_special);

        let f = frame("pu3");
        let d = relative_diagram(&f);
        assert_eq!(d.vertices.iter().map(|v| v.d).collect::<Vec<_>>(), vec![1, 3]);
        let flags = vertex_flags(&f, &d);
        assert!(flags[0].very_special && !flags[1].very_special && flags[1].special);
    }

    #[test]
    fn volumes() {
        let f = frame("pgl2");
        assert_eq!(volume_and_logvolume(&f, &[]).unwrap(), (vec![1], 0));
        assert_eq!(volume_and_logvolume(&f, &[0]).unwrap(), (vec![1, 1], 1));
        assert!(matches!(volume_and_logvolume(&f, &[0, 1]), Err(Error::InfiniteType(_))));
        let f = frame("pgl4_flip");
        assert_eq!(volume_and_logvolume(&f, &[1, 3]).unwrap(), (vec![1, 0, 1], 2));
        let f = frame("pu3");
        assert_eq!(volume_and_logvolume(&f, &[1, 2]).unwrap(), (vec![1, 0, 0, 1], 3));
    }

    #[test]
    fn very_special_examples() {
        let f = frame("pgl2");
        assert!(is_very_special_parahoric(&f, &[0]));
        assert!(!is_very_special_parahoric(&f, &[]));
        let f = frame("psp4");
        assert!(!is_very_special_parahoric(&f, &[1]));
        assert!(is_very_special_parahoric(&f, &[0, 1]));
        let f = frame("pu3");
        assert!(is_very_special_parahoric(&f, &[1, 2]));
        assert!(!is_very_special_parahoric(&f, &[0]));
    }

    #[test]
    fn twisted_inner_form_of_c2() {
        // The nontrivial Ω-twist swaps s0 and s2; the relative diagram has rank
        // one, so both vertices are special and the d = 1 vertex wins.
        let f = frame("psp4");
        let f = f.with_frob(f.frob.with_twist(f.g(), 1)).unwrap();
        assert_eq!(f.sperm, vec![2, 1, 0]);
        let d = relative_diagram(&f);
        let flags = vertex_flags(&f, &d);
        let by_orbit: HashMap<Vec<usize>, (usize, VertexFlags)> =
            d.vertices.iter().zip(&flags).map(|(v, fl)| (v.orbit.clone(), (v.d, *fl))).collect();
        assert_eq!(by_orbit[&vec![1]], (1, VertexFlags { special: true, very_special: true }));
        assert_eq!(by_orbit[&vec![0, 2]], (2, VertexFlags { special: true, very_special: false }));
        assert!(is_very_special_parahoric(&f, &[0, 2]));
        assert!(verify_prop36(&f, &[2, 3, 5]).unwrap().holds());
    }

    #[test]
    fn prop36_on_presets() {
        for name in ["pgl2", "sl2", "pgl3", "psp4", "so5", "g2", "pu3", "pgl4_flip", "pso8_triality"] {
            let f = frame(name);
            let report = verify_prop36(&f, &[2, 3, 5]).unwrap();
            assert!(report.holds(), "{name}: {:?}", report.violations);
        }
        let f = frame("pgl2");
        let r = verify_prop36(&f, &[2]).unwrap();
        assert_eq!(r.entries.len(), 3);
        let vs: Vec<_> = r.entries.iter().filter(|e| e.very_special).map(|e| e.k.clone()).collect();
        assert_eq!(vs, vec![vec![0], vec![1]]);
    }

    #[test]
    fn vol_is_monic_of_degree_logvol() {
        for name in ["pgl3", "psp4", "pgl4_flip", "pu3", "g2"] {
            let f = frame(name);
            for k in stable_finite_subsets(&f) {
                let (vol, logvol) = volume_and_logvolume(&f, &k).unwrap();
                assert_eq!(vol[0], 1);
                assert_eq!(vol.len() - 1, logvol, "{name} {k:?}");
                assert_eq!(*vol.last().unwrap(), 1);
            }
        }
    }

    /// d(w, v) = Σ d(ᾱ, v) over positive ᾱ of Φ_v made negative by w, on 2A_3.
    #[test]
    fn d_additivity_on_folded_a3() {
        let f = frame("pgl4_flip");
        let g = f.g();
        let d = relative_diagram(&f);
        let flags = vertex_flags(&f, &d);
        let n = g.rank();
        let vector_part = |v: &Vertex| -> Vec<i64> {
            let mut a = vec![0i64; n];
            for &i in &v.orbit {
                let c = g.simple[i].kind;
                match c {
                    crate::rootdata::NodeKind::Finite { index, .. } => a[index] += 1,
                    crate::rootdata::NodeKind::Affine { component } => {
                        let theta = &g.roots.pos_roots[g.components[component].highest_root];
                        for j in 0..n {
                            a[j] -= theta[j];
                        }
                    }
                }
            }
            let gcd = a.iter().fold(0i64, |x, &y| num_integer::Integer::gcd(&x, &y));
            a.into_iter().map(|x| x / gcd).collect()
        };
        for (vi, _) in d.vertices.iter().enumerate().filter(|(i, _)| flags[*i].special) {
            let others: Vec<usize> = (0..d.vertices.len()).filter(|&x| x != vi).collect();
            let gens: Vec<FiniteWeylElt> = others.iter().map(|&x| d.vertices[x].longest.u.clone()).collect();
            // Positive roots of Φ_v with their d-values, by reflecting simple roots.
            let mut pos: HashMap<Vec<i64>, usize> = HashMap::new();
            let mut queue = VecDeque::new();
            for &x in &others {
                let a = vector_part(&d.vertices[x]);
                pos.insert(a.clone(), d.vertices[x].d);
                queue.push_back(a);
            }
            let simple: Vec<Vec<i64>> = queue.iter().cloned().collect();
            while let Some(b) = queue.pop_front() {
                let db = pos[&b];
                for (s, a) in gens.iter().zip(&simple) {
                    if b == *a {
                        continue;
                    }
                    let c = s.apply_root(&b);
                    if !pos.contains_key(&c) {
                        pos.insert(c.clone(), db);
                        queue.push_back(c);
                    }
                }
            }
            let k: Vec<usize> = others.iter().flat_map(|&x| d.vertices[x].orbit.clone()).collect();
            for w in parabolic_elements(g, &k).unwrap().into_iter().filter(|w| f.sigma(w) == *w) {
                let expected: usize = pos
                    .iter()
                    .filter(|(b, _)| {
                        let img: Vec<i64> = w.u.apply_root(b).into_iter().map(|x| -x).collect();
                        pos.contains_key(&img)
                    })
                    .map(|(_, &dv)| dv)
                    .sum();
                assert_eq!(f.length(&w), expected);
            }
        }
    }
}
