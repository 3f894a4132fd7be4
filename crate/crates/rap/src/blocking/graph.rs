use super::{BlockingTable, Subassembly};

/// Directional blocking graph restricted to one subassembly: nodes are part
/// indices, an edge `p -> q` means translating `p` along the evaluated
/// direction collides with `q`.
#[derive(Clone, Debug)]
pub struct Dbg {
    parts: Vec<usize>,
    /// Adjacency lists over local indices into `parts`.
    adj: Vec<Vec<usize>>,
}

impl Dbg {
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn adj(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum()
    }

    /// Does the edge `p -> q` (global part ids) exist?
    pub fn has_edge(&self, p: usize, q: usize) -> bool {
        let (Some(pi), Some(qi)) = (self.local(p), self.local(q)) else {
            return false;
        };
        self.adj[pi].contains(&qi)
    }

    fn local(&self, part: usize) -> Option<usize> {
        self.parts.iter().position(|&x| x == part)
    }
}

/// Evaluates the DBG of subassembly `s` at direction `theta`.
/// A single-part subassembly yields an empty (edgeless) graph.
pub fn dbg_for(t: &BlockingTable, s: Subassembly, theta: f64) -> Dbg {
    let parts: Vec<usize> = s.iter().filter(|&p| p < t.n()).collect();
    let k = parts.len();
    let mut adj = vec![Vec::new(); k];
    for (pi, &p) in parts.iter().enumerate() {
        for (qi, &q) in parts.iter().enumerate() {
            if pi != qi && t.entry(p, q).contains(theta) {
                adj[pi].push(qi);
            }
        }
    }
    Dbg { parts, adj }
}

/// Strongly connected components plus the condensation DAG.
#[derive(Clone, Debug)]
pub struct Condensation {
    /// Components as sorted global part-id lists, ordered by smallest part id.
    pub comps: Vec<Vec<usize>>,
    /// Condensation adjacency over component indices (sorted, deduped).
    pub dag: Vec<Vec<usize>>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Component indices with no outgoing condensation edges.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.comps.len())
            .filter(|&c| self.dag[c].is_empty())
            .collect()
    }

    pub fn comp_mask(&self, c: usize) -> Subassembly {
        let mut m = 0u64;
        for &p in &self.comps[c] {
            m |= 1 << p;
        }
        Subassembly::from_mask(m)
    }
}

/// Tarjan SCC over the DBG, followed by condensation-edge extraction.
pub fn scc_condense(g: &Dbg) -> Condensation {
    let n = g.parts().len();
    let mut state = TarjanState {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v].is_none() {
            strongconnect(v, g.adj(), &mut state);
        }
    }
    // Map local node -> component, then translate to global part ids and
    // order components deterministically by their smallest part id.
    let ncomp = state.comps.len();
    let mut comp_of = vec![usize::MAX; n];
    for (cid, comp) in state.comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }
    let mut comps: Vec<Vec<usize>> = state
        .comps
        .iter()
        .map(|c| {
            let mut parts: Vec<usize> = c.iter().map(|&v| g.parts()[v]).collect();
            parts.sort_unstable();
            parts
        })
        .collect();
    let mut order: Vec<usize> = (0..ncomp).collect();
    order.sort_by_key(|&c| comps[c][0]);
    let mut rank = vec![0usize; ncomp];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut sorted_comps = vec![Vec::new(); ncomp];
    for (old, comp) in comps.drain(..).enumerate() {
        sorted_comps[rank[old]] = comp;
    }
    let mut dag = vec![Vec::new(); ncomp];
    for u in 0..n {
        let cu = rank[comp_of[u]];
        for &v in &g.adj()[u] {
            let cv = rank[comp_of[v]];
            if cu != cv {
                dag[cu].push(cv);
            }
        }
    }
    for out in &mut dag {
        out.sort_unstable();
        out.dedup();
    }
    Condensation {
        comps: sorted_comps,
        dag,
    }
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], state: &mut TarjanState) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;
    for &w in &adj[v] {
        if state.idx[w].is_none() {
            strongconnect(w, adj, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }
    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}
