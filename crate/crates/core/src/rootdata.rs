//! Based root systems, coweight lattices and group-datum files.
//!
//! Internally every coweight is stored in fundamental-coweight coordinates
//! (its pairings with the simple roots), so root pairings are dot products.
//! The lattice basis declared in the group file is used for text I/O and for
//! lattice membership.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affineweyl::{AffineElt, FrobeniusAction};
use crate::error::{Error, Result};
use crate::linalg::{self, rat, IntLattice, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl CartanType {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().replace('_', "");
        let bad = || Error::MalformedDocument(format!("unknown Cartan type {s:?}"));
        let (head, tail) = t.split_at(1.min(t.len()));
        let n: usize = tail.parse().map_err(|_| bad())?;
        let ty = match (head, n) {
            ("A", n) if n >= 1 => CartanType::A(n),
            ("B", n) if n >= 2 => CartanType::B(n),
            ("C", n) if n >= 2 => CartanType::C(n),
            ("D", n) if n >= 4 => CartanType::D(n),
            ("E", 6..=8) => CartanType::E(n),
            ("F", 4) => CartanType::F4,
            ("G", 2) => CartanType::G2,
            _ => return Err(bad()),
        };
        Ok(ty)
    }

    pub fn rank(self) -> usize {
        match self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) | CartanType::E(n) => n,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }

    /// Bourbaki-numbered Cartan matrix with entries ⟨α_i^∨, α_j⟩.
    pub fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self {
            CartanType::A(_) | CartanType::B(_) | CartanType::C(_) => {
                for i in 0..n - 1 {
                    link(i, i + 1);
                }
            }
            CartanType::D(_) => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            CartanType::E(_) => {
                link(0, 2);
                link(1, 3);
                for i in 2..n - 1 {
                    link(i, i + 1);
                }
            }
            CartanType::F4 => {
                link(0, 1);
                link(1, 2);
                link(2, 3);
            }
            CartanType::G2 => link(0, 1),
        }
        match self {
            CartanType::B(_) => a[n - 1][n - 2] = -2,
            CartanType::C(_) => a[n - 2][n - 1] = -2,
            CartanType::F4 => a[2][1] = -2,
            CartanType::G2 => a[0][1] = -3,
            _ => {}
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::E(n) => write!(f, "E{n}"),
            CartanType::F4 => write!(f, "F4"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

/// Element of the finite Weyl group, stored as its matrix on coweight
/// coordinates together with the inverse matrix. Rows of the inverse are the
/// images of the simple roots in simple-root coordinates, which is the image
/// table used for canonical ordering.
#[derive(Clone, Debug)]
pub struct FiniteWeylElt {
    n: usize,
    m: Vec<i64>,
    mi: Vec<i64>,
}

impl PartialEq for FiniteWeylElt {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}
impl Eq for FiniteWeylElt {}

impl std::hash::Hash for FiniteWeylElt {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.m.hash(state);
    }
}

impl PartialOrd for FiniteWeylElt {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FiniteWeylElt {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.mi.cmp(&other.mi)
    }
}

fn matmul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut c = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += x * b[k * n + j];
            }
        }
    }
    c
}

impl FiniteWeylElt {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        FiniteWeylElt { n, mi: m.clone(), m }
    }

    /// Reflection λ ↦ λ − ⟨λ, α⟩ α^∨ for a root with simple-root coordinates
    /// `root` and coroot in coweight coordinates `coroot`.
    pub fn reflection(root: &[i64], coroot: &[i64]) -> Self {
        let n = root.len();
        let mut m = vec![0i64; n * n];
        for j in 0..n {
            for k in 0..n {
                m[j * n + k] = i64::from(j == k) - coroot[j] * root[k];
            }
        }
        FiniteWeylElt { n, mi: m.clone(), m }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        FiniteWeylElt { n, m: matmul(n, &self.m, &other.m), mi: matmul(n, &other.mi, &self.mi) }
    }

    pub fn inv(&self) -> Self {
        FiniteWeylElt { n: self.n, m: self.mi.clone(), mi: self.m.clone() }
    }

    pub fn is_identity(&self) -> bool {
        *self == FiniteWeylElt::identity(self.n)
    }

    pub fn matrix(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.m[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.n + j]
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|k| self.m[i * n + k] * v[k]).sum()).collect()
    }

    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|k| rat(self.m[i * n + k]) * &v[k]).sum())
            .collect()
    }

    /// u(ρ^∨) in coweight coordinates; ⟨u ρ^∨, α⟩ > 0 iff u^{-1}α > 0.
    pub fn rho_image(&self) -> Vec<i64> {
        let n = self.n;
        (0..n).map(|i| self.m[i * n..(i + 1) * n].iter().sum()).collect()
    }

    /// u^{-1}(ρ^∨); ⟨u^{-1} ρ^∨, α⟩ > 0 iff uα > 0.
    pub fn inv_rho_image(&self) -> Vec<i64> {
        let n = self.n;
        (0..n).map(|i| self.mi[i * n..(i + 1) * n].iter().sum()).collect()
    }

    /// Image of the i-th simple root, in simple-root coordinates.
    pub fn simple_root_image(&self, i: usize) -> &[i64] {
        &self.mi[i * self.n..(i + 1) * self.n]
    }

    /// u(α) for α in simple-root coordinates.
    pub fn apply_root(&self, a: &[i64]) -> Vec<i64> {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|i| a[i] * self.mi[i * n + j]).sum()).collect()
    }

    /// Conjugate by a permutation P of the simple roots: P u P^{-1}.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut m = vec![0i64; n * n];
        let mut mi = vec![0i64; n * n];
        for j in 0..n {
            for k in 0..n {
                m[perm[j] * n + perm[k]] = self.m[j * n + k];
                mi[perm[j] * n + perm[k]] = self.mi[j * n + k];
            }
        }
        FiniteWeylElt { n, m, mi }
    }
}

/// Based root system with positive roots in simple-root coordinates and
/// positive coroots in coweight coordinates.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub pos_roots: Vec<Vec<i64>>,
    pub pos_coroots: Vec<Vec<i64>>,
    /// Sum of positive roots, simple-root coordinates.
    pub two_rho: Vec<i64>,
}

impl RootSystem {
    pub fn new(cartan: Vec<Vec<i64>>) -> Self {
        let n = cartan.len();
        let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..n {
            let mut a = vec![0i64; n];
            a[i] = 1;
            seen.insert(a.clone(), cartan[i].clone());
            queue.push_back(a);
        }
        while let Some(a) = queue.pop_front() {
            let c = seen[&a].clone();
            for j in 0..n {
                let pair: i64 = (0..n).map(|i| a[i] * cartan[j][i]).sum();
                let mut b = a.clone();
                b[j] -= pair;
                if b.iter().any(|&x| x < 0) || seen.contains_key(&b) {
                    continue;
                }
                let mut d = c.clone();
                let cj = c[j];
                for (k, x) in d.iter_mut().enumerate() {
                    *x -= cj * cartan[j][k];
                }
                seen.insert(b.clone(), d);
                queue.push_back(b);
            }
        }
        let mut roots: Vec<(Vec<i64>, Vec<i64>)> = seen.into_iter().collect();
        roots.sort_by(|x, y| {
            let hx: i64 = x.0.iter().sum();
            let hy: i64 = y.0.iter().sum();
            hx.cmp(&hy).then_with(|| y.0.cmp(&x.0))
        });
        let mut two_rho = vec![0i64; n];
        for (a, _) in &roots {
            for i in 0..n {
                two_rho[i] += a[i];
            }
        }
        let (pos_roots, pos_coroots) = roots.into_iter().unzip();
        RootSystem { rank: n, cartan, pos_roots, pos_coroots, two_rho }
    }

    pub fn simple_reflection(&self, i: usize) -> FiniteWeylElt {
        let mut a = vec![0i64; self.rank];
        a[i] = 1;
        FiniteWeylElt::reflection(&a, &self.cartan[i])
    }

    pub fn pairing(root: &[i64], coweight: &[i64]) -> i64 {
        root.iter().zip(coweight).map(|(a, b)| a * b).sum()
    }

    pub fn pairing_rat(root: &[i64], coweight: &[Rat]) -> Rat {
        root.iter().zip(coweight).map(|(&a, b)| rat(a) * b).sum()
    }

    pub fn length(&self, u: &FiniteWeylElt) -> usize {
        let g = u.rho_image();
        self.pos_roots.iter().filter(|a| Self::pairing(a, &g) < 0).count()
    }

    /// Reduced word via right descents, smallest index first.
    pub fn reduced_word(&self, u: &FiniteWeylElt) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = u.clone();
        loop {
            let g = cur.inv_rho_image();
            let Some(i) = (0..self.rank).find(|&i| g[i] < 0) else { break };
            word.push(i);
            cur = cur.mul(&self.simple_reflection(i));
        }
        word.reverse();
        word
    }

    /// Longest element of the parabolic subgroup generated by `subset`.
    pub fn longest_in(&self, subset: &[usize]) -> FiniteWeylElt {
        let mut cur = FiniteWeylElt::identity(self.rank);
        loop {
            let g = cur.inv_rho_image();
            let Some(&i) = subset.iter().find(|&&i| g[i] > 0) else { break };
            cur = cur.mul(&self.simple_reflection(i));
        }
        cur
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Tag(String),
    Basis { basis: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeTag {
    Adjoint,
    SimplyConnected,
    /// Basis rows in fundamental-coweight coordinates.
    Explicit(Vec<Vec<i64>>),
}

#[derive(Clone, Debug)]
pub struct Component {
    pub label: String,
    pub cartan_type: Option<CartanType>,
    pub lattice: LatticeTag,
    /// Global finite indices of this component, in the component's own order.
    pub nodes: Vec<usize>,
    /// Index of the affine node in S̆.
    pub affine_index: usize,
    /// Index into the positive roots of the highest root.
    pub highest_root: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ComponentDoc {
    #[serde(rename = "type")]
    ty: String,
    lattice: LatticeSpec,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct FrobeniusDoc {
    #[serde(default)]
    diagram_perm: Option<Vec<usize>>,
    #[serde(default)]
    omega_twist: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GroupDoc {
    name: String,
    components: Vec<ComponentDoc>,
    #[serde(default)]
    frobenius: FrobeniusDoc,
}

/// What a simple affine reflection is, in terms of the components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Affine { component: usize },
    Finite { component: usize, index: usize },
}

#[derive(Clone, Debug)]
pub struct SimpleReflection {
    pub index: usize,
    pub kind: NodeKind,
    pub elt: AffineElt,
}

pub struct GroupDatum {
    pub name: String,
    pub roots: RootSystem,
    pub components: Vec<Component>,
    /// Λ basis rows in coweight coordinates.
    pub lattice_basis: Vec<Vec<i64>>,
    lattice_basis_inv: Vec<Vec<Rat>>,
    cartan_inv: Vec<Vec<Rat>>,
    pub lattice: IntLattice,
    pub coroot_lattice: IntLattice,
    pub simple: Vec<SimpleReflection>,
    simple_lookup: HashMap<AffineElt, usize>,
    /// Length-zero elements, identity first.
    pub omega: Vec<AffineElt>,
    omega_names: Vec<String>,
    pub frobenius: FrobeniusAction,
    fingerprint: String,
    weyl_elements: OnceLock<Vec<FiniteWeylElt>>,
    layers: Mutex<Vec<Arc<Vec<AffineElt>>>>,
}

impl fmt::Debug for GroupDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupDatum").field("name", &self.name).field("rank", &self.rank()).finish()
    }
}

/// Description of one irreducible piece when building a datum directly.
#[derive(Clone, Debug)]
pub struct ComponentSpec {
    pub label: String,
    pub cartan_type: Option<CartanType>,
    pub cartan: Vec<Vec<i64>>,
    pub lattice: LatticeTag,
}

impl ComponentSpec {
    pub fn of_type(ty: CartanType, lattice: LatticeTag) -> Self {
        ComponentSpec { label: ty.to_string(), cartan_type: Some(ty), cartan: ty.cartan_matrix(), lattice }
    }
}

pub fn load_group(document: &str) -> Result<GroupDatum> {
    let doc: GroupDoc = serde_json::from_str(document).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    let mut specs = Vec::new();
    for c in &doc.components {
        let ty = CartanType::parse(&c.ty)?;
        let lattice = match &c.lattice {
            LatticeSpec::Tag(t) if t == "adjoint" => LatticeTag::Adjoint,
            LatticeSpec::Tag(t) if t == "simply_connected" => LatticeTag::SimplyConnected,
            LatticeSpec::Tag(t) => return Err(Error::MalformedDocument(format!("unknown lattice tag {t:?}"))),
            LatticeSpec::Basis { basis } => LatticeTag::Explicit(basis.clone()),
        };
        specs.push(ComponentSpec::of_type(ty, lattice));
    }
    let canonical = serde_json::to_string(&doc).expect("group document serializes");
    GroupDatum::build(&doc.name, specs, doc.frobenius.diagram_perm.as_deref(), doc.frobenius.omega_twist.as_deref(), &canonical)
}

impl GroupDatum {
    /// Build a datum; `diagram_perm` permutes S̆ indices, `omega_twist` names an Ω element.
    pub fn build(
        name: &str,
        specs: Vec<ComponentSpec>,
        diagram_perm: Option<&[usize]>,
        omega_twist: Option<&str>,
        fingerprint_source: &str,
    ) -> Result<GroupDatum> {
        let n: usize = specs.iter().map(|s| s.cartan.len()).sum();
        let mut cartan = vec![vec![0i64; n]; n];
        let mut offset = 0;
        let mut basis: Vec<Vec<i64>> = Vec::new();
        let mut comp_nodes = Vec::new();
        for spec in &specs {
            let r = spec.cartan.len();
            if r == 0 || spec.cartan.iter().any(|row| row.len() != r) {
                return Err(Error::InconsistentCartan(format!("{}: Cartan matrix is not square", spec.label)));
            }
            if let Some(ty) = spec.cartan_type {
                if ty.cartan_matrix() != spec.cartan {
                    return Err(Error::InconsistentCartan(format!("{} does not match its type", spec.label)));
                }
            }
            for i in 0..r {
                for j in 0..r {
                    let a = spec.cartan[i][j];
                    let ok = if i == j { a == 2 } else { a <= 0 && ((a == 0) == (spec.cartan[j][i] == 0)) };
                    if !ok {
                        return Err(Error::InconsistentCartan(format!("{}: bad entry ({i},{j})", spec.label)));
                    }
                    cartan[offset + i][offset + j] = a;
                }
            }
            let local: Vec<Vec<i64>> = match &spec.lattice {
                LatticeTag::Adjoint => (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect(),
                LatticeTag::SimplyConnected => spec.cartan.clone(),
                LatticeTag::Explicit(b) => {
                    if b.len() != r || b.iter().any(|row| row.len() != r) {
                        return Err(Error::MalformedDocument(format!("{}: basis must be {r}x{r}", spec.label)));
                    }
                    b.clone()
                }
            };
            for row in local {
                let mut full = vec![0i64; n];
                full[offset..offset + r].copy_from_slice(&row);
                basis.push(full);
            }
            comp_nodes.push((offset..offset + r).collect::<Vec<_>>());
            offset += r;
        }
        let basis_rat: Vec<Vec<Rat>> = basis.iter().map(|r| linalg::to_rat_vec(r)).collect();
        let basis_inv = linalg::invert(&basis_rat).ok_or(Error::SingularBasis)?;
        let cartan_rat: Vec<Vec<Rat>> = cartan.iter().map(|r| linalg::to_rat_vec(r)).collect();
        let cartan_inv = linalg::invert(&cartan_rat)
            .ok_or_else(|| Error::InconsistentCartan("Cartan matrix is singular".into()))?;
        let roots = RootSystem::new(cartan.clone());
        let expected: usize = specs
            .iter()
            .filter_map(|s| s.cartan_type)
            .map(|t| match t {
                CartanType::A(n) => n * (n + 1) / 2,
                CartanType::B(n) | CartanType::C(n) => n * n,
                CartanType::D(n) => n * (n - 1),
                CartanType::E(6) => 36,
                CartanType::E(7) => 63,
                CartanType::E(_) => 120,
                CartanType::F4 => 24,
                CartanType::G2 => 6,
            })
            .sum();
        if specs.iter().all(|s| s.cartan_type.is_some()) && expected != roots.pos_roots.len() {
            return Err(Error::InconsistentCartan("root count does not match the Cartan type".into()));
        }
        let lattice = IntLattice::from_generators(n, &basis);
        let coroot_lattice = IntLattice::from_generators(n, &cartan);
        for (i, row) in cartan.iter().enumerate() {
            if !linalg::is_integral(&linalg::row_times(&linalg::to_rat_vec(row), &basis_inv)) {
                return Err(Error::LatticeNotBetweenQandP(format!("simple coroot {i} is not in the lattice")));
            }
        }

        let mut components = Vec::new();
        let mut simple = Vec::new();
        let mut s_index = 0;
        for (c, spec) in specs.iter().enumerate() {
            let nodes = comp_nodes[c].clone();
            let highest_root = (0..roots.pos_roots.len())
                .filter(|&k| {
                    let a = &roots.pos_roots[k];
                    (0..n).all(|i| a[i] == 0 || nodes.contains(&i))
                })
                .max_by_key(|&k| roots.pos_roots[k].iter().sum::<i64>())
                .expect("component has roots");
            let theta = &roots.pos_roots[highest_root];
            let theta_v = &roots.pos_coroots[highest_root];
            let s0 = AffineElt::new(theta_v.clone(), FiniteWeylElt::reflection(theta, theta_v));
            simple.push(SimpleReflection { index: s_index, kind: NodeKind::Affine { component: c }, elt: s0 });
            let affine_index = s_index;
            s_index += 1;
            for &i in &nodes {
                simple.push(SimpleReflection {
                    index: s_index,
                    kind: NodeKind::Finite { component: c, index: i },
                    elt: AffineElt::new(vec![0; n], roots.simple_reflection(i)),
                });
                s_index += 1;
            }
            components.push(Component {
                label: spec.label.clone(),
                cartan_type: spec.cartan_type,
                lattice: spec.lattice.clone(),
                nodes,
                affine_index,
                highest_root,
            });
        }
        let simple_lookup = simple.iter().map(|s| (s.elt.clone(), s.index)).collect();

        let mut group = GroupDatum {
            name: name.to_string(),
            roots,
            components,
            lattice_basis: basis,
            lattice_basis_inv: basis_inv,
            cartan_inv,
            lattice,
            coroot_lattice,
            simple,
            simple_lookup,
            omega: Vec::new(),
            omega_names: Vec::new(),
            frobenius: FrobeniusAction::trivial(n),
            fingerprint: String::new(),
            weyl_elements: OnceLock::new(),
            layers: Mutex::new(Vec::new()),
        };
        group.compute_omega();
        group.frobenius = group.frobenius_from(diagram_perm, omega_twist)?;
        group.fingerprint = {
            use sha2::{Digest, Sha256};
            let mut h = Sha256::new();
            h.update(fingerprint_source.as_bytes());
            h.update(crate::ENGINE_VERSION.as_bytes());
            hex::encode(&h.finalize()[..8])
        };
        Ok(group)
    }

    fn compute_omega(&mut self) {
        let n = self.rank();
        // Per component: 0 and the minuscule fundamental coweights lying in Λ.
        let mut per_component: Vec<Vec<AffineElt>> = Vec::new();
        for comp in &self.components {
            let theta = &self.roots.pos_roots[comp.highest_root];
            let mut elts = vec![AffineElt::identity(n)];
            for &j in &comp.nodes {
                if theta[j] != 1 {
                    continue;
                }
                let mut w = vec![0i64; n];
                w[j] = 1;
                if !self.lattice.contains(&w) {
                    continue;
                }
                let others: Vec<usize> = comp.nodes.iter().copied().filter(|&i| i != j).collect();
                let u = self.roots.longest_in(&others).mul(&self.roots.longest_in(&comp.nodes));
                let tau = AffineElt::new(w, u);
                debug_assert_eq!(crate::affineweyl::length(self, &tau), 0);
                elts.push(tau);
            }
            per_component.push(elts);
        }
        let mut all = vec![AffineElt::identity(n)];
        for elts in &per_component {
            let mut next = Vec::new();
            for a in &all {
                for b in elts {
                    next.push(a.mul(b));
                }
            }
            all = next;
        }
        let mut named: Vec<(Vec<usize>, AffineElt)> = all
            .into_iter()
            .map(|t| {
                let tinv = t.inverse();
                let images = self
                    .components
                    .iter()
                    .map(|c| self.simple_lookup[&t.mul(&self.simple[c.affine_index].elt).mul(&tinv)])
                    .collect();
                (images, t)
            })
            .collect();
        named.sort_by(|a, b| a.0.cmp(&b.0));
        self.omega_names = named
            .iter()
            .map(|(im, _)| format!("tau:{}", im.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        self.omega = named.into_iter().map(|(_, t)| t).collect();
    }

    fn frobenius_from(&self, diagram_perm: Option<&[usize]>, omega_twist: Option<&str>) -> Result<FrobeniusAction> {
        let n = self.rank();
        let ns = self.simple.len();
        let mut perm = (0..n).collect::<Vec<_>>();
        if let Some(dp) = diagram_perm {
            if dp.len() != ns || dp.iter().copied().collect::<BTreeSet<_>>().len() != ns || dp.iter().any(|&k| k >= ns) {
                return Err(Error::MalformedDocument("diagram_perm is not a permutation of the affine nodes".into()));
            }
            for s in &self.simple {
                match (s.kind, self.simple[dp[s.index]].kind) {
                    (NodeKind::Finite { index, .. }, NodeKind::Finite { index: j, .. }) => perm[index] = j,
                    (NodeKind::Affine { .. }, NodeKind::Affine { .. }) => {}
                    _ => {
                        return Err(Error::FrobeniusNotBasePreserving(format!(
                            "node {} is sent to node {} of a different kind",
                            s.index, dp[s.index]
                        )))
                    }
                }
            }
            let c = &self.roots.cartan;
            for i in 0..n {
                for j in 0..n {
                    if c[perm[i]][perm[j]] != c[i][j] {
                        return Err(Error::FrobeniusNotBasePreserving("permutation does not preserve the Cartan matrix".into()));
                    }
                }
            }
            for (ci, comp) in self.components.iter().enumerate() {
                let target = self.component_of_finite(perm[comp.nodes[0]]);
                if dp[comp.affine_index] != self.components[target].affine_index
                    || comp.nodes.iter().any(|&i| self.component_of_finite(perm[i]) != target)
                {
                    return Err(Error::FrobeniusNotBasePreserving(format!("component {ci} is not mapped compatibly")));
                }
            }
            for row in &self.lattice_basis {
                let mut img = vec![0i64; n];
                for i in 0..n {
                    img[perm[i]] = row[i];
                }
                if !self.lattice.contains(&img) {
                    return Err(Error::FrobeniusNotBasePreserving("diagram automorphism does not preserve the lattice".into()));
                }
            }
        }
        let twist = match omega_twist {
            None => 0,
            Some(name) => self
                .omega_index_by_name(name)
                .ok_or_else(|| Error::MalformedDocument(format!("unknown Omega element {name:?}")))?,
        };
        Ok(FrobeniusAction::new(perm, self.omega[twist].clone(), twist))
    }

    pub fn rank(&self) -> usize {
        self.roots.rank
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn component_of_finite(&self, i: usize) -> usize {
        self.components.iter().position(|c| c.nodes.contains(&i)).expect("finite index in some component")
    }

    pub fn num_simple(&self) -> usize {
        self.simple.len()
    }

    pub fn simple_index(&self, w: &AffineElt) -> Option<usize> {
        self.simple_lookup.get(w).copied()
    }

    pub fn omega_name(&self, k: usize) -> &str {
        &self.omega_names[k]
    }

    pub fn omega_index_by_name(&self, name: &str) -> Option<usize> {
        let name = name.trim();
        if let Some(k) = self.omega_names.iter().position(|x| x == name) {
            return Some(k);
        }
        // Single-component shorthand and identity spelled with the affine nodes.
        let body = name.strip_prefix("tau:")?;
        let parts: Vec<usize> = body.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
        let full = format!("tau:{}", parts.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
        self.omega_names.iter().position(|x| *x == full)
    }

    /// Index of the Ω element in the coset λ + Q^∨.
    pub fn omega_index_of_translation(&self, lam: &[i64]) -> usize {
        self.omega
            .iter()
            .position(|t| {
                let d: Vec<i64> = lam.iter().zip(&t.lam).map(|(a, b)| a - b).collect();
                self.coroot_lattice.contains(&d)
            })
            .expect("every coset of Q^∨ in Λ has an Ω representative")
    }

    /// Convert Λ-basis coordinates to coweight coordinates.
    pub fn from_basis_coords(&self, c: &[i64]) -> Vec<i64> {
        let n = self.rank();
        (0..n).map(|j| c.iter().zip(&self.lattice_basis).map(|(x, row)| x * row[j]).sum()).collect()
    }

    /// Convert coweight coordinates of a lattice element to Λ-basis coordinates.
    pub fn to_basis_coords(&self, lam: &[i64]) -> Option<Vec<i64>> {
        let r = linalg::row_times(&linalg::to_rat_vec(lam), &self.lattice_basis_inv);
        r.iter().map(linalg::rat_to_i64).collect()
    }

    pub fn to_basis_coords_rat(&self, lam: &[Rat]) -> Vec<Rat> {
        linalg::row_times(lam, &self.lattice_basis_inv)
    }

    pub fn in_lattice(&self, lam: &[i64]) -> bool {
        self.lattice.contains(lam)
    }

    /// Coefficients of λ in the simple-coroot basis.
    pub fn coroot_coords(&self, lam: &[Rat]) -> Vec<Rat> {
        linalg::row_times(lam, &self.cartan_inv)
    }

    pub fn is_dominant(&self, lam: &[Rat]) -> bool {
        lam.iter().all(|x| !x.is_negative())
    }

    pub fn is_central(&self, lam: &[Rat]) -> bool {
        lam.iter().all(|x| x.is_zero())
    }

    /// All elements of the finite Weyl group, sorted canonically.
    pub fn weyl_elements(&self) -> Result<&[FiniteWeylElt]> {
        const CAP: usize = 200_000;
        if let Some(v) = self.weyl_elements.get() {
            return Ok(v);
        }
        let n = self.rank();
        let gens: Vec<FiniteWeylElt> = (0..n).map(|i| self.roots.simple_reflection(i)).collect();
        let mut seen = std::collections::HashSet::new();
        let id = FiniteWeylElt::identity(n);
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(u) = queue.pop_front() {
            for g in &gens {
                let v = u.mul(g);
                if seen.insert(v.clone()) {
                    if seen.len() > CAP {
                        return Err(Error::SearchBudgetExceeded(CAP));
                    }
                    queue.push_back(v);
                }
            }
        }
        let mut all: Vec<FiniteWeylElt> = seen.into_iter().collect();
        all.sort();
        Ok(self.weyl_elements.get_or_init(|| all))
    }

    /// Elements of the affine Weyl group W̆_a of length exactly `len`, sorted.
    pub fn affine_layer(&self, len: usize, budget: usize) -> Result<Arc<Vec<AffineElt>>> {
        let mut layers = self.layers.lock().expect("layer cache poisoned");
        if layers.is_empty() {
            layers.push(Arc::new(vec![AffineElt::identity(self.rank())]));
        }
        let mut total: usize = layers.iter().map(|l| l.len()).sum();
        while layers.len() <= len {
            let prev = layers.last().expect("nonempty").clone();
            let k = layers.len();
            let mut next = std::collections::HashSet::new();
            for x in prev.iter() {
                for s in &self.simple {
                    let y = x.mul(&s.elt);
                    if crate::affineweyl::length(self, &y) == k {
                        next.insert(y);
                    }
                }
            }
            total += next.len();
            if total > budget {
                return Err(Error::SearchBudgetExceeded(budget));
            }
            let mut v: Vec<AffineElt> = next.into_iter().collect();
            v.sort();
            layers.push(Arc::new(v));
        }
        Ok(layers[len].clone())
    }

    /// Adjoint datum of the Levi subgroup with the given finite simple roots,
    /// with the diagram automorphism restricted (it must stabilize the set).
    pub fn levi_adjoint(&self, levi: &[usize]) -> Result<(GroupDatum, Vec<usize>)> {
        let set: BTreeSet<usize> = levi.iter().copied().collect();
        let perm = &self.frobenius.perm;
        if set.iter().any(|&i| !set.contains(&perm[i])) {
            return Err(Error::UnsupportedFrame("Levi subset is not Frobenius-stable".into()));
        }
        // Connected pieces of the sub-diagram, each listed in increasing order.
        let c = &self.roots.cartan;
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        let mut left = set.clone();
        while let Some(&start) = left.iter().next() {
            let mut piece = vec![start];
            left.remove(&start);
            let mut k = 0;
            while k < piece.len() {
                let i = piece[k];
                let nbrs: Vec<usize> = left.iter().copied().filter(|&j| c[i][j] != 0).collect();
                for j in nbrs {
                    left.remove(&j);
                    piece.push(j);
                }
                k += 1;
            }
            piece.sort();
            pieces.push(piece);
        }
        pieces.sort();
        let order: Vec<usize> = pieces.iter().flatten().copied().collect();
        let specs: Vec<ComponentSpec> = pieces
            .iter()
            .map(|p| {
                let cartan: Vec<Vec<i64>> = p.iter().map(|&i| p.iter().map(|&j| c[i][j]).collect()).collect();
                let label = format!("levi{}", p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_"));
                ComponentSpec { label, cartan_type: None, cartan, lattice: LatticeTag::Adjoint }
            })
            .collect();
        let pos = |g: usize| order.iter().position(|&x| x == g).expect("levi index");
        let mut s_perm = Vec::new();
        let mut s_offsets = Vec::new();
        let mut off = 0;
        for p in &pieces {
            s_offsets.push(off);
            off += p.len() + 1;
        }
        let piece_of = |g: usize| pieces.iter().position(|p| p.contains(&g)).expect("piece");
        for (pi, p) in pieces.iter().enumerate() {
            let target = piece_of(perm[p[0]]);
            s_perm.push(s_offsets[target]);
            for &g in p {
                let img = perm[g];
                let tp = piece_of(img);
                let _ = pi;
                s_perm.push(s_offsets[tp] + 1 + pieces[tp].iter().position(|&x| x == img).expect("node"));
            }
        }
        let _ = pos;
        let source = format!("{}|levi{:?}", self.fingerprint, order);
        let datum = GroupDatum::build(&format!("{}[M{:?}]", self.name, order), specs, Some(&s_perm), None, &source)?;
        Ok((datum, order))
    }
}

/// λ ≤ λ2 in the dominance order: λ2 − λ is a nonnegative rational combination of simple coroots.
pub fn dominance_leq(g: &GroupDatum, lam: &[Rat], lam2: &[Rat]) -> bool {
    let d: Vec<Rat> = lam2.iter().zip(lam).map(|(a, b)| a - b).collect();
    linalg::all_nonneg(&g.coroot_coords(&d))
}

/// Dominant representative and the minimal-length u with u(λ) = λ_dom.
pub fn dominant_rep(g: &GroupDatum, lam: &[Rat]) -> (Vec<Rat>, FiniteWeylElt) {
    let mut cur = lam.to_vec();
    let mut u = FiniteWeylElt::identity(g.rank());
    while let Some(i) = (0..cur.len()).find(|&i| cur[i].is_negative()) {
        let s = g.roots.simple_reflection(i);
        cur = s.apply_rat(&cur);
        u = s.mul(&u);
    }
    (cur, u)
}

pub fn dominant_rep_int(g: &GroupDatum, lam: &[i64]) -> (Vec<i64>, FiniteWeylElt) {
    let mut cur = lam.to_vec();
    let mut u = FiniteWeylElt::identity(g.rank());
    while let Some(i) = (0..cur.len()).find(|&i| cur[i] < 0) {
        let s = g.roots.simple_reflection(i);
        cur = s.apply(&cur);
        u = s.mul(&u);
    }
    (cur, u)
}

/// ⟨λ, ρ⟩.
pub fn rho_pairing(g: &GroupDatum, lam: &[Rat]) -> Rat {
    RootSystem::pairing_rat(&g.roots.two_rho, lam) / rat(2)
}

/// ⟨λ, 2ρ⟩.
pub fn two_rho_pairing(g: &GroupDatum, lam: &[Rat]) -> Rat {
    RootSystem::pairing_rat(&g.roots.two_rho, lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat_frac, to_rat_vec};
    use crate::presets;

    #[test]
    fn positive_root_counts() {
        for (ty, count) in [
            (CartanType::A(3), 6),
            (CartanType::B(3), 9),
            (CartanType::C(3), 9),
            (CartanType::D(4), 12),
            (CartanType::D(5), 20),
            (CartanType::E(6), 36),
            (CartanType::E(7), 63),
            (CartanType::E(8), 120),
            (CartanType::F4, 24),
            (CartanType::G2, 6),
        ] {
            let rs = RootSystem::new(ty.cartan_matrix());
            assert_eq!(rs.pos_roots.len(), count, "{ty}");
        }
    }

    #[test]
    fn cartan_reproduced_by_pairings() {
        for ty in [CartanType::B(2), CartanType::C(3), CartanType::G2, CartanType::F4] {
            let rs = RootSystem::new(ty.cartan_matrix());
            let n = rs.rank;
            for i in 0..n {
                let ci = rs.pos_roots.iter().position(|a| a.iter().enumerate().all(|(k, &x)| x == i64::from(k == i))).unwrap();
                for j in 0..n {
                    // ⟨α_i^∨, α_j⟩ = j-th coweight coordinate of α_i^∨
                    assert_eq!(rs.pos_coroots[ci][j], rs.cartan[i][j]);
                }
            }
        }
    }

    #[test]
    fn highest_roots() {
        let g = presets::load("g2").unwrap();
        let theta = &g.roots.pos_roots[g.components[0].highest_root];
        assert_eq!(theta, &vec![3, 2]);
        let g = presets::load("pgl2").unwrap();
        assert_eq!(g.roots.pos_coroots[g.components[0].highest_root], vec![2]);
    }

    #[test]
    fn omega_orders() {
        assert_eq!(presets::load("pgl2").unwrap().omega.len(), 2);
        assert_eq!(presets::load("sl2").unwrap().omega.len(), 1);
        assert_eq!(presets::load("psp4").unwrap().omega.len(), 2);
        assert_eq!(presets::load("pgl3").unwrap().omega.len(), 3);
        assert_eq!(presets::load("g2").unwrap().omega.len(), 1);
        assert_eq!(presets::load("pso8_triality").unwrap().omega.len(), 4);
    }

    #[test]
    fn a1_lattices() {
        let adj = presets::load("pgl2").unwrap();
        assert_eq!(adj.lattice_basis, vec![vec![1]]);
        assert_eq!(adj.to_basis_coords(&[2]), Some(vec![2]));
        let sc = presets::load("sl2").unwrap();
        assert_eq!(sc.to_basis_coords(&[2]), Some(vec![1]));
        assert_eq!(sc.to_basis_coords(&[1]), None);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(load_group("{"), Err(Error::MalformedDocument(_))));
        assert!(matches!(
            load_group(r#"{"name":"x","components":[{"type":"Q7","lattice":"adjoint"}]}"#),
            Err(Error::MalformedDocument(_))
        ));
        // ω ∉ Λ basis generated by 2α^∨ which misses α^∨.
        assert!(matches!(
            load_group(r#"{"name":"x","components":[{"type":"A1","lattice":{"basis":[[4]]}}]}"#),
            Err(Error::LatticeNotBetweenQandP(_))
        ));
        assert!(matches!(
            load_group(r#"{"name":"x","components":[{"type":"A2","lattice":"adjoint"}],"frobenius":{"diagram_perm":[1,0,2]}}"#),
            Err(Error::FrobeniusNotBasePreserving(_))
        ));
        assert!(matches!(
            load_group(r#"{"name":"x","components":[{"type":"B2","lattice":"adjoint"}],"frobenius":{"diagram_perm":[0,2,1]}}"#),
            Err(Error::FrobeniusNotBasePreserving(_))
        ));
        assert!(matches!(
            load_group(r#"{"name":"x","components":[{"type":"A1","lattice":{"basis":[[0]]}}]}"#),
            Err(Error::SingularBasis)
        ));
    }

    #[test]
    fn dominance_examples() {
        let g = presets::load("pgl2").unwrap();
        assert!(dominance_leq(&g, &to_rat_vec(&[0]), &to_rat_vec(&[2])));
        assert!(!dominance_leq(&g, &to_rat_vec(&[2]), &to_rat_vec(&[0])));
        assert!(dominance_leq(&g, &to_rat_vec(&[1]), &to_rat_vec(&[1])));
        assert_eq!(rho_pairing(&g, &to_rat_vec(&[2])), rat(1));
        assert_eq!(rho_pairing(&g, &to_rat_vec(&[1])), rat_frac(1, 2));
        assert_eq!(rho_pairing(&g, &to_rat_vec(&[0])), rat(0));
        let (d, u) = dominant_rep(&g, &to_rat_vec(&[-1]));
        assert_eq!(d, to_rat_vec(&[1]));
        assert_eq!(u, g.roots.simple_reflection(0));
        let (d, u) = dominant_rep(&g, &to_rat_vec(&[0]));
        assert_eq!(d, to_rat_vec(&[0]));
        assert!(u.is_identity());
    }

    #[test]
    fn dominant_rep_matches_exhaustive_search() {
        let g = presets::load("pgl3").unwrap();
        let lam = to_rat_vec(&[-1, 2]);
        let (d, u) = dominant_rep(&g, &lam);
        let w = g.weyl_elements().unwrap();
        let mut best: Option<(usize, FiniteWeylElt)> = None;
        for x in w {
            let img = x.apply_rat(&lam);
            if g.is_dominant(&img) {
                let l = g.roots.length(x);
                if best.as_ref().is_none_or(|(bl, _)| l < *bl) {
                    best = Some((l, x.clone()));
                }
            }
        }
        let (_, bu) = best.unwrap();
        assert_eq!(u, bu);
        assert_eq!(d, to_rat_vec(&[1, 1]));
    }

    #[test]
    fn dominance_is_partial_order_on_small_grid() {
        let g = presets::load("pgl3").unwrap();
        let pts: Vec<Vec<Rat>> = (0..4).flat_map(|a| (0..4).map(move |b| to_rat_vec(&[a, b]))).collect();
        for x in &pts {
            assert!(dominance_leq(&g, x, x));
            for y in &pts {
                if x != y && dominance_leq(&g, x, y) {
                    assert!(!dominance_leq(&g, y, x));
                }
                for z in &pts {
                    if dominance_leq(&g, x, y) && dominance_leq(&g, y, z) {
                        assert!(dominance_leq(&g, x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn reduced_words_have_correct_length() {
        let g = presets::load("g2").unwrap();
        for u in g.weyl_elements().unwrap() {
            let word = g.roots.reduced_word(u);
            assert_eq!(word.len(), g.roots.length(u));
            let mut v = FiniteWeylElt::identity(2);
            for &i in &word {
                v = v.mul(&g.roots.simple_reflection(i));
            }
            assert_eq!(&v, u);
        }
        assert_eq!(g.weyl_elements().unwrap().len(), 12);
    }

    #[test]
    fn levi_adjoint_shapes() {
        let g = presets::load("pgl4_flip").unwrap();
        let (m, order) = g.levi_adjoint(&[0, 2]).unwrap();
        assert_eq!(order, vec![0, 2]);
        assert_eq!(m.components.len(), 2);
        assert_eq!(m.omega.len(), 4);
        assert_eq!(m.frobenius.perm, vec![1, 0]);
        let (t, _) = g.levi_adjoint(&[]).unwrap();
        assert_eq!(t.rank(), 0);
        assert_eq!(t.omega.len(), 1);
        assert!(g.levi_adjoint(&[0]).is_err());
    }
}
