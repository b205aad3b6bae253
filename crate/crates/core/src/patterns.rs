//! Forbidden families and small-pattern subgraph search.
//!
//! Embeddings are non-induced: every pattern arc must map to a host arc, extra
//! host arcs are ignored. Searches enumerate image tuples in ascending
//! lexicographic order, so the first hit is deterministic.

use std::fmt;
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::digraph::{Digraph, SccDecomposition};
use crate::vset::VertexSet;

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {root} is not a root of the pattern")]
    InvalidRoot { root: usize },
    #[error("unknown family `{0}` (expected dfvs, out-degree:<d>, bounded-size:<s>, path:<p> or custom:<file>)")]
    UnknownFamily(String),
    #[error("bounded-size family needs s >= 1")]
    ZeroBound,
    #[error("family has no members")]
    Empty,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Smallest vertex reaching every vertex of `h`, if any.
pub fn detect_root(h: &Digraph) -> Option<usize> {
    all_roots(h).first().copied()
}

fn all_roots(h: &Digraph) -> Vec<usize> {
    let everything = h.vertex_set();
    h.vertices()
        .filter(|&v| h.reachable_from(&VertexSet::singleton(v), &VertexSet::new()) == *everything)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    graph: Digraph,
    canonical_root: Option<usize>,
    roots: Vec<usize>,
}

impl Pattern {
    pub fn new(graph: Digraph) -> Self {
        let roots = all_roots(&graph);
        Pattern {
            canonical_root: roots.first().copied(),
            graph,
            roots,
        }
    }

    /// A pattern whose canonical root is pinned to `root`, which must reach every vertex.
    pub fn with_root(graph: Digraph, root: usize) -> Result<Self, PatternError> {
        let mut p = Pattern::new(graph);
        if !p.roots.contains(&root) {
            return Err(PatternError::InvalidRoot { root });
        }
        p.canonical_root = Some(root);
        Ok(p)
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn canonical_root(&self) -> Option<usize> {
        self.canonical_root
    }

    /// Every vertex that reaches all others, ascending.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `Some(p)` when the pattern is a directed path with `p` arcs.
    pub fn path_length(&self) -> Option<usize> {
        let g = &self.graph;
        let n = g.vertex_count();
        if g.arc_count() + 1 != n || self.roots.len() != 1 {
            return None;
        }
        g.vertices()
            .all(|v| g.out_degree(v) <= 1 && g.in_neighbors(v).len() <= 1)
            .then_some(n - 1)
    }

    pub fn out_star(leaves: usize) -> Self {
        let arcs: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        Pattern::new(Digraph::new(leaves + 1, &arcs).unwrap())
    }

    pub fn directed_path(arcs: usize) -> Self {
        let list: Vec<_> = (0..arcs).map(|i| (i, i + 1)).collect();
        Pattern::new(Digraph::new(arcs + 1, &list).unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Members {
    Explicit(Vec<Pattern>),
    /// All arborescences on `size` vertices, i.e. component size bound `size - 1`.
    Arborescences(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    AllRooted,
    HasPath,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenFamily {
    members: Members,
}

impl ForbiddenFamily {
    pub fn from_patterns(patterns: Vec<Pattern>) -> Result<Self, PatternError> {
        if patterns.is_empty() {
            return Err(PatternError::Empty);
        }
        Ok(ForbiddenFamily {
            members: Members::Explicit(patterns),
        })
    }

    pub fn dfvs() -> Self {
        Self::from_patterns(vec![Pattern::directed_path(1)]).unwrap()
    }

    /// Forbids a vertex with more than `d` out-neighbours inside a component.
    pub fn out_degree(d: usize) -> Self {
        Self::from_patterns(vec![Pattern::out_star(d + 1)]).unwrap()
    }

    /// Forbids strong components with more than `s` vertices.
    pub fn bounded_size(s: usize) -> Result<Self, PatternError> {
        if s == 0 {
            return Err(PatternError::ZeroBound);
        }
        Ok(ForbiddenFamily {
            members: Members::Arborescences(s + 1),
        })
    }

    pub fn path(p: usize) -> Self {
        Self::from_patterns(vec![Pattern::directed_path(p)]).unwrap()
    }

    /// Explicit members; `None` for the implicit bounded-size family.
    pub fn patterns(&self) -> Option<&[Pattern]> {
        match &self.members {
            Members::Explicit(p) => Some(p),
            Members::Arborescences(_) => None,
        }
    }

    /// `Some(s)` for the bounded-size family.
    pub fn component_bound(&self) -> Option<usize> {
        match self.members {
            Members::Arborescences(size) => Some(size - 1),
            Members::Explicit(_) => None,
        }
    }

    /// Largest member order.
    pub fn h(&self) -> usize {
        match &self.members {
            Members::Explicit(p) => p.iter().map(Pattern::vertex_count).max().unwrap_or(0),
            Members::Arborescences(size) => *size,
        }
    }

    pub fn is_rooted(&self) -> bool {
        match &self.members {
            Members::Explicit(p) => p.iter().all(|p| p.canonical_root.is_some()),
            Members::Arborescences(_) => true,
        }
    }

    /// Arc count of the shortest directed-path member.
    pub fn shortest_path_member(&self) -> Option<usize> {
        match &self.members {
            Members::Explicit(p) => p.iter().filter_map(Pattern::path_length).min(),
            Members::Arborescences(size) => Some(size - 1),
        }
    }

    /// Both "all rooted" and "has a path" can hold at once; a path member with
    /// at least two arcs takes precedence, since single-arc families are
    /// better served by the rooted pipeline.
    pub fn kind(&self) -> FamilyKind {
        if self.component_bound().is_some() {
            return FamilyKind::AllRooted;
        }
        let longest_path = self
            .patterns()
            .unwrap()
            .iter()
            .filter_map(Pattern::path_length)
            .max();
        match (longest_path, self.is_rooted()) {
            (Some(p), _) if p >= 2 => FamilyKind::HasPath,
            (_, true) => FamilyKind::AllRooted,
            (Some(_), false) => FamilyKind::HasPath,
            (None, false) => FamilyKind::General,
        }
    }
}

/// Family selector as used on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Dfvs,
    OutDegree(usize),
    BoundedSize(usize),
    Path(usize),
    Custom(PathBuf),
}

impl FromStr for FamilySpec {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || PatternError::UnknownFamily(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let num = |a: Option<&str>| a.and_then(|a| a.parse::<usize>().ok()).ok_or_else(unknown);
        match name {
            "dfvs" if arg.is_none() => Ok(FamilySpec::Dfvs),
            "out-degree" => Ok(FamilySpec::OutDegree(num(arg)?)),
            "bounded-size" => Ok(FamilySpec::BoundedSize(num(arg)?)),
            "path" => Ok(FamilySpec::Path(num(arg)?)),
            "custom" => Ok(FamilySpec::Custom(arg.filter(|a| !a.is_empty()).ok_or_else(unknown)?.into())),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Dfvs => write!(f, "dfvs"),
            FamilySpec::OutDegree(d) => write!(f, "out-degree:{d}"),
            FamilySpec::BoundedSize(s) => write!(f, "bounded-size:{s}"),
            FamilySpec::Path(p) => write!(f, "path:{p}"),
            FamilySpec::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

pub fn builtin_family(spec: &FamilySpec) -> Result<ForbiddenFamily, PatternError> {
    match spec {
        FamilySpec::Dfvs => Ok(ForbiddenFamily::dfvs()),
        FamilySpec::OutDegree(d) => Ok(ForbiddenFamily::out_degree(*d)),
        FamilySpec::BoundedSize(s) => ForbiddenFamily::bounded_size(*s),
        FamilySpec::Path(p) => Ok(ForbiddenFamily::path(*p)),
        FamilySpec::Custom(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| PatternError::Io {
                path: path.clone(),
                source,
            })?;
            parse_family(&text)
        }
    }
}

/// Family file: blocks separated by blank lines, each `h <n>`, arc lines
/// `<u> <v>` and an optional `root <v>`. `#` starts a comment line.
pub fn parse_family(text: &str) -> Result<ForbiddenFamily, PatternError> {
    struct Block {
        start: usize,
        n: usize,
        arcs: Vec<(usize, usize)>,
        root: Option<(usize, usize)>,
    }
    let perr = |line: usize, message: String| PatternError::Parse { line, message };
    let mut blocks: Vec<Block> = Vec::new();
    let mut current: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            blocks.extend(current.take());
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_num = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| perr(line_no, format!("bad number `{f}`")))
        };
        match (&mut current, fields.as_slice()) {
            (None, ["h", n]) => {
                current = Some(Block {
                    start: line_no,
                    n: parse_num(n)?,
                    arcs: Vec::new(),
                    root: None,
                })
            }
            (None, _) => return Err(perr(line_no, format!("expected `h <n>`, found `{line}`"))),
            (Some(b), ["root", v]) => {
                if b.root.is_some() {
                    return Err(perr(line_no, "duplicate root line".into()));
                }
                b.root = Some((parse_num(v)?, line_no));
            }
            (Some(b), [u, v]) => {
                let (u, v) = (parse_num(u)?, parse_num(v)?);
                if u >= b.n || v >= b.n {
                    return Err(perr(line_no, format!("arc {u} {v} out of range 0..{}", b.n)));
                }
                b.arcs.push((u, v));
            }
            (Some(_), _) => return Err(perr(line_no, format!("unexpected line `{line}`"))),
        }
    }
    blocks.extend(current.take());
    let mut patterns = Vec::new();
    for b in blocks {
        let g = Digraph::new(b.n, &b.arcs).map_err(|e| perr(b.start, e.to_string()))?;
        let p = match b.root {
            Some((r, line)) => Pattern::with_root(g, r).map_err(|e| perr(line, e.to_string()))?,
            None => Pattern::new(g),
        };
        patterns.push(p);
    }
    ForbiddenFamily::from_patterns(patterns).map_err(|_| perr(0, "family file has no patterns".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub pattern: Pattern,
    /// `image[i]` is the host vertex of pattern vertex `i`.
    pub image: Vec<usize>,
}

impl Embedding {
    pub fn vertices(&self) -> VertexSet {
        self.image.iter().collect()
    }

    /// Host images of every root of the pattern.
    pub fn root_images(&self) -> impl Iterator<Item = usize> + '_ {
        self.pattern.roots.iter().map(|&r| self.image[r])
    }

    /// Injectivity and arc preservation.
    pub fn is_valid_in(&self, d: &Digraph) -> bool {
        let distinct: VertexSet = self.image.iter().collect();
        distinct.len() == self.image.len()
            && self.image.len() == self.pattern.graph.id_bound()
            && self.image.iter().all(|&v| d.has_vertex(v))
            && self
                .pattern
                .graph
                .arcs()
                .all(|(a, b)| d.has_arc(self.image[a], self.image[b]))
    }
}

/// First embedding (in lexicographic image order) of a family member, with
/// some root of the copy inside `root_in` when given and the whole copy inside
/// one strong component when `same_scc` holds.
pub fn find_forbidden_subgraph(
    d: &Digraph,
    fam: &ForbiddenFamily,
    root_in: Option<&VertexSet>,
    same_scc: bool,
) -> Option<Embedding> {
    let scc = same_scc.then(|| d.scc_decompose());
    match &fam.members {
        Members::Explicit(patterns) => patterns.iter().find_map(|p| {
            let mut found = None;
            let _ = for_each_embedding_in(d, p, root_in, scc.as_ref(), |img| {
                found = Some(img.to_vec());
                ControlFlow::Break(())
            });
            found.map(|image| Embedding {
                pattern: p.clone(),
                image,
            })
        }),
        Members::Arborescences(size) => find_arborescence(d, *size, root_in, scc.as_ref()),
    }
}

/// Calls `f` on every embedding of `p` in `d`, in lexicographic image order.
pub fn for_each_embedding(
    d: &Digraph,
    p: &Pattern,
    root_in: Option<&VertexSet>,
    same_scc: bool,
    f: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let scc = same_scc.then(|| d.scc_decompose());
    for_each_embedding_in(d, p, root_in, scc.as_ref(), f)
}

/// True iff every strong component of D − x is free of the family.
pub fn check_solution(d: &Digraph, fam: &ForbiddenFamily, x: &VertexSet) -> bool {
    let rest = d.remove_vertices(x);
    if let Some(s) = fam.component_bound() {
        return rest.scc_decompose().components.iter().all(|c| c.len() <= s);
    }
    find_forbidden_subgraph(&rest, fam, None, true).is_none()
}

struct Matcher<'a, F> {
    d: &'a Digraph,
    p: &'a Pattern,
    scc: Option<&'a SccDecomposition>,
    root_in: Option<&'a VertexSet>,
    /// Pattern index after which every root has been placed.
    roots_placed_at: usize,
    /// Per pattern vertex: earlier out-neighbours and earlier in-neighbours.
    back_in: Vec<Vec<usize>>,
    back_out: Vec<Vec<usize>>,
    image: Vec<usize>,
    used: VertexSet,
    f: F,
}

impl<F: FnMut(&[usize]) -> ControlFlow<()>> Matcher<'_, F> {
    fn run(&mut self, i: usize) -> ControlFlow<()> {
        let h = self.p.graph.id_bound();
        if i == self.roots_placed_at + 1 {
            if let Some(allowed) = self.root_in {
                if !self.p.roots.iter().any(|&r| allowed.contains(self.image[r])) {
                    return ControlFlow::Continue(());
                }
            }
        }
        if i == h {
            return (self.f)(&self.image);
        }
        // Candidate list: the shortest adjacency list among placed neighbours.
        let mut pool: Option<&[usize]> = None;
        for &j in &self.back_in[i] {
            let l = self.d.out_neighbors(self.image[j]);
            if pool.is_none_or(|p| l.len() < p.len()) {
                pool = Some(l);
            }
        }
        for &j in &self.back_out[i] {
            let l = self.d.in_neighbors(self.image[j]);
            if pool.is_none_or(|p| l.len() < p.len()) {
                pool = Some(l);
            }
        }
        let candidates: Vec<usize> = match pool {
            Some(l) => l.to_vec(),
            None => self.d.vertices().collect(),
        };
        let pg = &self.p.graph;
        for c in candidates {
            if self.used.contains(c)
                || self.d.out_degree(c) < pg.out_degree(i)
                || self.d.in_neighbors(c).len() < pg.in_neighbors(i).len()
            {
                continue;
            }
            if let Some(scc) = self.scc {
                if i > 0 && !scc.same_component(c, self.image[0]) {
                    continue;
                }
                if i == 0 && scc.components[scc.component_of[c]].len() < h {
                    continue;
                }
            }
            if !self.back_in[i].iter().all(|&j| self.d.has_arc(self.image[j], c))
                || !self.back_out[i].iter().all(|&j| self.d.has_arc(c, self.image[j]))
            {
                continue;
            }
            self.image[i] = c;
            self.used.insert(c);
            let r = self.run(i + 1);
            self.used.remove(c);
            r?;
        }
        ControlFlow::Continue(())
    }
}

fn for_each_embedding_in(
    d: &Digraph,
    p: &Pattern,
    root_in: Option<&VertexSet>,
    scc: Option<&SccDecomposition>,
    f: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let pg = &p.graph;
    let h = pg.id_bound();
    if h > d.vertex_count() || (root_in.is_some() && p.roots.is_empty()) {
        return ControlFlow::Continue(());
    }
    let mut back_in = vec![Vec::new(); h];
    let mut back_out = vec![Vec::new(); h];
    for (a, b) in pg.arcs() {
        if a < b {
            back_in[b].push(a);
        } else {
            back_out[a].push(b);
        }
    }
    let mut m = Matcher {
        d,
        p,
        scc,
        root_in,
        roots_placed_at: p.roots.iter().copied().max().unwrap_or(0),
        back_in,
        back_out,
        image: vec![0; h],
        used: VertexSet::new(),
        f,
    };
    m.run(0)
}

/// BFS tree truncated to `size` vertices, rooted at the smallest admissible vertex.
fn find_arborescence(
    d: &Digraph,
    size: usize,
    root_in: Option<&VertexSet>,
    scc: Option<&SccDecomposition>,
) -> Option<Embedding> {
    for r in d.vertices() {
        if root_in.is_some_and(|s| !s.contains(r)) {
            continue;
        }
        if let Some(scc) = scc {
            if scc.components[scc.component_of[r]].len() < size {
                continue;
            }
        }
        let mut order = vec![r];
        let mut parent_idx = vec![usize::MAX];
        let mut seen = VertexSet::singleton(r);
        let mut head = 0;
        while head < order.len() && order.len() < size {
            let u = order[head];
            for &v in d.out_neighbors(u) {
                if order.len() == size {
                    break;
                }
                if scc.is_some_and(|s| !s.same_component(v, r)) || !seen.insert(v) {
                    continue;
                }
                order.push(v);
                parent_idx.push(head);
            }
            head += 1;
        }
        if order.len() == size {
            let arcs: Vec<_> = (1..size).map(|i| (parent_idx[i], i)).collect();
            let tree = Pattern::new(Digraph::new(size, &arcs).unwrap());
            return Some(Embedding {
                pattern: tree,
                image: order,
            });
        }
    }
    None
}
