//! The extended affine Weyl group Λ ⋊ W_0, its length function, the Frobenius
//! action, and the text encoding of elements.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rootdata::{FiniteWeylElt, GroupDatum, NodeKind, RootSystem};

/// w = t^lam · u, with `lam` in coweight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElt {
    pub lam: Vec<i64>,
    pub u: FiniteWeylElt,
}

impl AffineElt {
    pub fn new(lam: Vec<i64>, u: FiniteWeylElt) -> Self {
        debug_assert_eq!(lam.len(), u.rank());
        AffineElt { lam, u }
    }

    pub fn identity(n: usize) -> Self {
        AffineElt { lam: vec![0; n], u: FiniteWeylElt::identity(n) }
    }

    pub fn translation(lam: Vec<i64>) -> Self {
        let n = lam.len();
        AffineElt { lam, u: FiniteWeylElt::identity(n) }
    }

    pub fn finite(u: FiniteWeylElt) -> Self {
        AffineElt { lam: vec![0; u.rank()], u }
    }

    pub fn rank(&self) -> usize {
        self.lam.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let moved = self.u.apply(&other.lam);
        let lam = self.lam.iter().zip(&moved).map(|(a, b)| a + b).collect();
        AffineElt { lam, u: self.u.mul(&other.u) }
    }

    pub fn inverse(&self) -> Self {
        let ui = self.u.inv();
        let lam = ui.apply(&self.lam).into_iter().map(|x| -x).collect();
        AffineElt { lam, u: ui }
    }

    pub fn is_identity(&self) -> bool {
        self.lam.iter().all(|&x| x == 0) && self.u.is_identity()
    }

    pub fn is_translation(&self) -> bool {
        self.u.is_identity()
    }

    /// Ordering used for canonical representatives: length, then λ, then image table.
    pub fn canonical_cmp(g: &GroupDatum, a: &Self, b: &Self) -> std::cmp::Ordering {
        length(g, a).cmp(&length(g, b)).then_with(|| a.cmp(b))
    }
}

/// Iwahori–Matsumoto length.
pub fn length(g: &GroupDatum, w: &AffineElt) -> usize {
    length_in(&g.roots, w)
}

pub fn length_in(roots: &RootSystem, w: &AffineElt) -> usize {
    let h = w.u.rho_image();
    let mut total = 0i64;
    for a in &roots.pos_roots {
        let p = RootSystem::pairing(a, &w.lam);
        total += if RootSystem::pairing(a, &h) > 0 { p.abs() } else { (p - 1).abs() };
    }
    total as usize
}

/// Linear part P of the Frobenius (a diagram automorphism) together with a
/// length-zero twist τ, acting by w ↦ τ δ(w) τ^{-1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrobeniusAction {
    /// P(ω_i) = ω_{perm[i]}.
    pub perm: Vec<usize>,
    pub twist: AffineElt,
    pub twist_inv: AffineElt,
    /// Index of the twist in Ω of the ambient datum.
    pub twist_index: usize,
}

impl FrobeniusAction {
    pub fn trivial(n: usize) -> Self {
        FrobeniusAction {
            perm: (0..n).collect(),
            twist: AffineElt::identity(n),
            twist_inv: AffineElt::identity(n),
            twist_index: 0,
        }
    }

    pub fn new(perm: Vec<usize>, twist: AffineElt, twist_index: usize) -> Self {
        let twist_inv = twist.inverse();
        FrobeniusAction { perm, twist, twist_inv, twist_index }
    }

    pub fn with_twist(&self, g: &GroupDatum, k: usize) -> Self {
        FrobeniusAction::new(self.perm.clone(), g.omega[k].clone(), k)
    }

    pub fn is_split(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j) && self.twist.is_identity()
    }

    pub fn permute_coweight<T: Clone>(&self, lam: &[T]) -> Vec<T> {
        let mut out = lam.to_vec();
        for (i, x) in lam.iter().enumerate() {
            out[self.perm[i]] = x.clone();
        }
        out
    }

    /// δ, the untwisted diagram action.
    pub fn delta(&self, w: &AffineElt) -> AffineElt {
        AffineElt { lam: self.permute_coweight(&w.lam), u: w.u.permute(&self.perm) }
    }

    pub fn apply(&self, w: &AffineElt) -> AffineElt {
        self.twist.mul(&self.delta(w)).mul(&self.twist_inv)
    }

    /// Matrix of the linear action on coweights: u_τ ∘ P.
    pub fn linear_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.perm.len();
        let mut p = vec![vec![0i64; n]; n];
        for i in 0..n {
            p[self.perm[i]][i] = 1;
        }
        let t = self.twist.u.matrix();
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| t[i][k] * p[k][j]).sum()).collect()).collect()
    }
}

/// A group datum together with a chosen Frobenius, precomputed on S̆.
#[derive(Clone, Debug)]
pub struct Frame {
    pub group: Arc<GroupDatum>,
    pub frob: FrobeniusAction,
    /// σ(s_i) = s_{sperm[i]}.
    pub sperm: Vec<usize>,
    order: usize,
}

impl Frame {
    pub fn new(group: Arc<GroupDatum>, frob: FrobeniusAction) -> Result<Self> {
        let mut sperm = Vec::with_capacity(group.num_simple());
        for s in &group.simple {
            let img = frob.apply(&s.elt);
            let j = group.simple_index(&img).ok_or_else(|| {
                Error::FrobeniusNotBasePreserving(format!("image of s{} is not a simple reflection", s.index))
            })?;
            sperm.push(j);
        }
        for t in &group.omega {
            if length(&group, &frob.apply(t)) != 0 {
                return Err(Error::FrobeniusNotBasePreserving("Omega is not preserved".into()));
            }
        }
        let mut frame = Frame { group, frob, sperm, order: 1 };
        frame.order = frame.compute_order();
        Ok(frame)
    }

    /// The datum with its own default Frobenius.
    pub fn standard(group: Arc<GroupDatum>) -> Result<Self> {
        let frob = group.frobenius.clone();
        Frame::new(group, frob)
    }

    pub fn with_frob(&self, frob: FrobeniusAction) -> Result<Self> {
        Frame::new(self.group.clone(), frob)
    }

    fn compute_order(&self) -> usize {
        let gens: Vec<AffineElt> =
            self.group.simple.iter().map(|s| s.elt.clone()).chain(self.group.omega.iter().cloned()).collect();
        let mut cur = gens.clone();
        for k in 1..=10_000 {
            cur = cur.iter().map(|x| self.sigma(x)).collect();
            if cur == gens {
                return k;
            }
        }
        unreachable!("Frobenius of infinite order on a finite generating set")
    }

    pub fn g(&self) -> &GroupDatum {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sigma(&self, w: &AffineElt) -> AffineElt {
        self.frob.apply(w)
    }

    pub fn simple(&self, i: usize) -> &AffineElt {
        &self.group.simple[i].elt
    }

    /// x ↦ g x σ(g)^{-1}.
    pub fn twisted_conj(&self, g: &AffineElt, x: &AffineElt) -> AffineElt {
        g.mul(x).mul(&self.sigma(g).inverse())
    }

    /// s x σ(s) for a simple reflection s.
    pub fn shift(&self, i: usize, x: &AffineElt) -> AffineElt {
        self.simple(i).mul(x).mul(self.simple(self.sperm[i]))
    }

    pub fn length(&self, w: &AffineElt) -> usize {
        length(&self.group, w)
    }
}

/// Index in Ω of the image of w in W̆/W̆_a.
pub fn kappa_tilde(g: &GroupDatum, w: &AffineElt) -> usize {
    g.omega_index_of_translation(&w.lam)
}

/// Reduced word of w as (Ω index, S̆ word) with w = τ · s_{i1} ⋯ s_{ik}.
pub fn reduced_word(g: &GroupDatum, w: &AffineElt) -> (usize, Vec<usize>) {
    let k = kappa_tilde(g, w);
    let mut cur = g.omega[k].inverse().mul(w);
    let mut word = Vec::new();
    let mut len = length(g, &cur);
    while len > 0 {
        let (i, next) = g
            .simple
            .iter()
            .map(|s| (s.index, cur.mul(&s.elt)))
            .find(|(_, y)| length(g, y) < len)
            .expect("nontrivial element of the affine Weyl group has a right descent");
        word.push(i);
        cur = next;
        len -= 1;
    }
    word.reverse();
    (k, word)
}

/// Decomposition w = x t^μ y with x, y finite, μ dominant and t^μ y minimal
/// in its left W_0-coset; asserts ℓ(w) = ℓ(x) + ℓ(t^μ) − ℓ(y).
pub fn im_decompose(g: &GroupDatum, w: &AffineElt) -> Result<(FiniteWeylElt, Vec<i64>, FiniteWeylElt)> {
    let (mu, _) = crate::rootdata::dominant_rep_int(g, &w.lam);
    let tmu = AffineElt::translation(mu.clone());
    let lw = length(g, w);
    let lt = length(g, &tmu);
    for x in g.weyl_elements()? {
        if x.apply(&mu) != w.lam {
            continue;
        }
        let y = x.inv().mul(&w.u);
        let ty = tmu.mul(&AffineElt::finite(y.clone()));
        let lty = length(g, &ty);
        let minimal = (0..g.rank()).all(|i| length(g, &AffineElt::finite(g.roots.simple_reflection(i)).mul(&ty)) > lty);
        if !minimal {
            continue;
        }
        let lx = g.roots.length(x);
        let ly = g.roots.length(&y);
        if lx + lt != lw + ly {
            return Err(Error::CrossCheckMismatch("length identity fails for the decomposition".into()));
        }
        return Ok((x.clone(), mu, y));
    }
    Err(Error::CrossCheckMismatch("no decomposition found".into()))
}

fn parse_s_token(g: &GroupDatum, tok: &str) -> Result<usize> {
    let k: usize = tok
        .strip_prefix('s')
        .and_then(|d| if d.chars().all(|c| c.is_ascii_digit()) && !d.is_empty() { d.parse().ok() } else { None })
        .ok_or_else(|| Error::MalformedElement(format!("bad token {tok:?}")))?;
    if k >= g.num_simple() {
        return Err(Error::MalformedElement(format!("no simple reflection s{k}")));
    }
    Ok(k)
}

/// Parse "tau:<k> s0 s1 …", "1", or "t[c1,…,cn] * w[s1 s2 …]" (c in Λ-basis coordinates).
pub fn parse_element(g: &GroupDatum, text: &str) -> Result<AffineElt> {
    let n = g.rank();
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("t[") {
        let (coords, rest) =
            rest.split_once(']').ok_or_else(|| Error::MalformedElement("unterminated t[...]".into()))?;
        let c: Vec<i64> = if coords.trim().is_empty() {
            Vec::new()
        } else {
            coords
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Error::MalformedElement(format!("bad coordinate {x:?}"))))
                .collect::<Result<_>>()?
        };
        if c.len() != n {
            return Err(Error::MalformedElement(format!("expected {n} coordinates, got {}", c.len())));
        }
        if c.iter().any(|x| x.unsigned_abs() > 1 << 40) {
            return Err(Error::MalformedElement("coordinate out of range".into()));
        }
        let rest = rest.trim_start();
        let rest = rest.strip_prefix('*').ok_or_else(|| Error::MalformedElement("expected '*'".into()))?.trim_start();
        let body = rest
            .strip_prefix("w[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::MalformedElement("expected w[...]".into()))?;
        let mut u = FiniteWeylElt::identity(n);
        for tok in body.split_whitespace() {
            let k = parse_s_token(g, tok)?;
            match g.simple[k].kind {
                NodeKind::Finite { index, .. } => u = u.mul(&g.roots.simple_reflection(index)),
                NodeKind::Affine { .. } => {
                    return Err(Error::MalformedElement(format!("s{k} is not a finite reflection")))
                }
            }
        }
        return Ok(AffineElt::new(g.from_basis_coords(&c), u));
    }
    let mut w = AffineElt::identity(n);
    let mut toks = text.split_whitespace().peekable();
    if toks.peek().is_none() {
        return Err(Error::MalformedElement("empty element".into()));
    }
    if toks.peek() == Some(&"1") {
        toks.next();
        if toks.next().is_some() {
            return Err(Error::MalformedElement("trailing tokens after 1".into()));
        }
        return Ok(w);
    }
    if let Some(tok) = toks.peek().copied() {
        if tok.starts_with("tau:") {
            let k = g.omega_index_by_name(tok).ok_or_else(|| Error::MalformedElement(format!("unknown {tok:?}")))?;
            w = g.omega[k].clone();
            toks.next();
        }
    }
    for tok in toks {
        let k = parse_s_token(g, tok)?;
        w = w.mul(&g.simple[k].elt);
    }
    Ok(w)
}

/// Canonical pair form "t[c1,…,cn] * w[s_i …]".
pub fn format_element(g: &GroupDatum, w: &AffineElt) -> String {
    let c = g.to_basis_coords(&w.lam).expect("translation part lies in the lattice");
    let finite_label = |i: usize| {
        g.simple
            .iter()
            .find(|s| s.kind == NodeKind::Finite { component: g.component_of_finite(i), index: i })
            .expect("finite node")
            .index
    };
    let word: Vec<String> = g.roots.reduced_word(&w.u).into_iter().map(|i| format!("s{}", finite_label(i))).collect();
    format!(
        "t[{}] * w[{}]",
        c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        word.join(" ")
    )
}

/// Word form "tau:<k> s… " (the prefix is dropped for the identity of Ω, "1" for w = 1).
pub fn format_word(g: &GroupDatum, w: &AffineElt) -> String {
    let (k, word) = reduced_word(g, w);
    let mut parts: Vec<String> = Vec::new();
    if k != 0 {
        parts.push(g.omega_name(k).to_string());
    }
    parts.extend(word.iter().map(|i| format!("s{i}")));
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}
