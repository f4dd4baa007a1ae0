//! Rooted and weighted trees.
//!
//! Vertices are stored in lexicographic order of their ids, so a vertex is an
//! index into that order. Every non-root vertex `v` owns exactly one edge, the
//! edge to its parent, and that edge is also addressed by `v`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a vertex in [`RootedTree`]'s sorted id order.
pub type Vertex = usize;
/// An edge, identified with its lower endpoint.
pub type Edge = usize;

/// Result of comparing two elements of a partially ordered set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl Order {
    pub fn reverse(self) -> Order {
        match self {
            Order::Greater => Order::Less,
            Order::Less => Order::Greater,
            other => other,
        }
    }

    pub fn is_geq(self) -> bool {
        matches!(self, Order::Greater | Order::Equal)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Order::Greater => "greater",
            Order::Less => "less",
            Order::Equal => "equal",
            Order::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

pub(crate) fn check_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(Error::Structure(format!(
            "vertex id `{id}` must be non-empty and use only [A-Za-z0-9_.-]"
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedTree {
    names: Vec<String>,
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    depth: Vec<usize>,
    root: Vertex,
}

impl RootedTree {
    /// Builds a tree from a root id and a child -> parent map.
    pub fn new(root: &str, parents: &BTreeMap<String, String>) -> Result<Self> {
        let mut ids: BTreeSet<&str> = BTreeSet::new();
        ids.insert(root);
        for (c, p) in parents {
            ids.insert(c);
            ids.insert(p);
        }
        if parents.contains_key(root) {
            return Err(Error::Structure(format!("root `{root}` has a parent")));
        }
        let names: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut parent = vec![None; names.len()];
        for (c, p) in parents {
            parent[index[c.as_str()]] = Some(index[p.as_str()]);
        }
        for (v, name) in names.iter().enumerate() {
            if v != index[root] && parent[v].is_none() {
                return Err(Error::Structure(format!("vertex `{name}` has no parent")));
            }
        }
        Self::from_parts(names, parent)
    }

    /// Builds a tree from ids and parent indices; ids need not be sorted.
    pub fn from_parts(names: Vec<String>, parent: Vec<Option<Vertex>>) -> Result<Self> {
        if names.len() != parent.len() {
            return Err(Error::Structure("ids and parents differ in length".into()));
        }
        for n in &names {
            check_id(n)?;
        }
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|a, b| names[*a].cmp(&names[*b]));
        for w in order.windows(2) {
            if names[w[0]] == names[w[1]] {
                return Err(Error::Structure(format!("duplicate vertex id `{}`", names[w[0]])));
            }
        }
        let mut new_of = vec![0; names.len()];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let sorted_names: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let mut sorted_parent = vec![None; names.len()];
        for (old, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                if *p >= names.len() {
                    return Err(Error::Structure("parent index out of range".into()));
                }
                sorted_parent[new_of[old]] = Some(new_of[*p]);
            }
        }
        let roots: Vec<usize> = (0..names.len()).filter(|v| sorted_parent[*v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::Structure(format!("expected exactly one root, found {}", roots.len())));
        }
        let root = roots[0];
        let n = names.len();
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        for v in 0..n {
            // walk up until a vertex of known depth; a walk longer than n is a cycle
            let mut path = vec![];
            let mut cur = v;
            while depth[cur] == usize::MAX {
                path.push(cur);
                if path.len() > n {
                    return Err(Error::Structure("parent map has a cycle".into()));
                }
                cur = sorted_parent[cur].expect("non-root has parent");
            }
            let mut d = depth[cur];
            for &p in path.iter().rev() {
                d += 1;
                depth[p] = d;
            }
        }
        let mut children = vec![vec![]; n];
        for v in 0..n {
            if let Some(p) = sorted_parent[v] {
                children[p].push(v);
            }
        }
        Ok(RootedTree { names: sorted_names, parent: sorted_parent, children, depth, root })
    }

    /// The tree with a single vertex.
    pub fn point(root: &str) -> Result<Self> {
        Self::from_parts(vec![root.to_string()], vec![None])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<Vertex> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Result<Edge> {
        match self.vertex(name) {
            Ok(v) if v != self.root => Ok(v),
            _ => Err(Error::UnknownEdge(name.to_string())),
        }
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.names.len()
    }

    /// All edges, in vertex-id order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices().filter(move |v| *v != self.root)
    }

    pub fn edge_count(&self) -> usize {
        self.names.len() - 1
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<Vertex>] {
        &self.parent
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    /// The edge above `v`, if `v` is not the root.
    pub fn edge_of(&self, v: Vertex) -> Option<Edge> {
        self.parent[v].map(|_| v)
    }

    /// `(v_e⁺, v_e⁻)`.
    pub fn endpoints(&self, e: Edge) -> Result<(Vertex, Vertex)> {
        match self.parent.get(e) {
            Some(Some(p)) => Ok((*p, e)),
            Some(None) => Err(Error::UnknownEdge(format!("{} (the root has no edge)", self.names[e]))),
            None => Err(Error::UnknownEdge(format!("#{e}"))),
        }
    }

    /// Upper endpoint of an edge; panics on the root.
    pub fn upper(&self, e: Edge) -> Vertex {
        self.parent[e].expect("edge has an upper endpoint")
    }

    /// Whether `v ⪰ w`, i.e. `v` lies on the path from the root to `w`.
    pub fn is_ancestor_or_equal(&self, v: Vertex, w: Vertex) -> bool {
        let mut cur = w;
        while self.depth[cur] > self.depth[v] {
            cur = self.parent[cur].expect("depth > 0");
        }
        cur == v
    }

    pub fn compare_vertices(&self, v: Vertex, w: Vertex) -> Order {
        if v == w {
            Order::Equal
        } else if self.is_ancestor_or_equal(v, w) {
            Order::Greater
        } else if self.is_ancestor_or_equal(w, v) {
            Order::Less
        } else {
            Order::Incomparable
        }
    }

    /// Edge order: `e ≻ f` iff `v_e⁻ ⪰ v_f⁺`. With edges named by their
    /// lower vertex this is the vertex order restricted to non-root vertices.
    pub fn compare_edges(&self, e: Edge, f: Edge) -> Order {
        debug_assert!(e != self.root && f != self.root);
        self.compare_vertices(e, f)
    }

    /// `{e′ : e′ ⪰ e}`: `e` together with every edge on its path to the root.
    pub fn descendants_geq(&self, e: Edge) -> Vec<Edge> {
        let mut out = vec![];
        let mut cur = e;
        while self.parent[cur].is_some() {
            out.push(cur);
            cur = self.parent[cur].unwrap();
        }
        out
    }

    /// Vertices from `v` up to and including the root.
    pub fn path_to_root(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Minimal vertices under the tree order, i.e. leaves (the root when alone).
    pub fn minimal_vertices(&self) -> Vec<Vertex> {
        self.vertices().filter(|v| self.children[*v].is_empty()).collect()
    }

    pub fn parent_map(&self) -> BTreeMap<String, String> {
        self.edges()
            .map(|e| (self.names[e].clone(), self.names[self.upper(e)].clone()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedTree {
    pub tree: RootedTree,
    weight: Vec<u32>,
}

impl WeightedTree {
    pub fn new(tree: RootedTree, weight: Vec<u32>) -> Result<Self> {
        if weight.len() != tree.len() {
            return Err(Error::Structure("one weight per vertex required".into()));
        }
        Ok(WeightedTree { tree, weight })
    }

    pub fn from_maps(
        root: &str,
        parents: &BTreeMap<String, String>,
        weights: &BTreeMap<String, u32>,
    ) -> Result<Self> {
        let tree = RootedTree::new(root, parents)?;
        for k in weights.keys() {
            tree.vertex(k)?;
        }
        let weight = tree.names().iter().map(|n| weights.get(n).copied().unwrap_or(0)).collect();
        Self::new(tree, weight)
    }

    pub fn weight(&self, v: Vertex) -> u32 {
        self.weight[v]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weight
    }

    pub fn total_weight(&self) -> u64 {
        self.weight.iter().map(|w| *w as u64).sum()
    }
}
