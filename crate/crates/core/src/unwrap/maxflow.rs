//! Max-flow / min-cut on small-to-medium sparse graphs.
//!
//! Dinic's algorithm: repeated BFS level graphs with blocking flows found by
//! iterative augmenting-path DFS. Capacities are `f64`; residuals below a
//! scale-relative epsilon count as saturated.

#[derive(Debug, Clone, Default)]
pub struct FlowGraph {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    max_cap: f64,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            ..Self::default()
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds `u → v` with capacity `cap_uv` and `v → u` with `cap_vu`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap_uv: f64, cap_vu: f64) {
        debug_assert!(cap_uv >= 0.0 && cap_vu >= 0.0);
        let e = self.to.len();
        self.to.push(v);
        self.cap.push(cap_uv);
        self.to.push(u);
        self.cap.push(cap_vu);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        self.max_cap = self.max_cap.max(cap_uv).max(cap_vu);
    }

    fn eps(&self) -> f64 {
        1e-12 * self.max_cap.max(1.0)
    }

    fn levels(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        let eps = self.eps();
        level.fill(-1);
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if level[v] < 0 && self.cap[e] > eps {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level[t] >= 0
    }

    /// Pushes the maximum flow from `s` to `t` and returns its value.
    /// Residual capacities are left in the graph for cut extraction.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        assert_ne!(s, t);
        let n = self.adj.len();
        let eps = self.eps();
        let mut level = vec![-1i32; n];
        let mut iter = vec![0usize; n];
        let mut total = 0.0;
        let mut path: Vec<usize> = Vec::new();

        while self.levels(s, t, &mut level) {
            iter.fill(0);
            path.clear();
            let mut u = s;
            loop {
                if u == t {
                    let push = path
                        .iter()
                        .map(|&e| self.cap[e])
                        .fold(f64::INFINITY, f64::min);
                    for &e in &path {
                        self.cap[e] -= push;
                        self.cap[e ^ 1] += push;
                    }
                    total += push;
                    path.clear();
                    u = s;
                    continue;
                }
                let mut advanced = false;
                while iter[u] < self.adj[u].len() {
                    let e = self.adj[u][iter[u]];
                    let v = self.to[e];
                    if self.cap[e] > eps && level[v] == level[u] + 1 {
                        path.push(e);
                        u = v;
                        advanced = true;
                        break;
                    }
                    iter[u] += 1;
                }
                if advanced {
                    continue;
                }
                if u == s {
                    break;
                }
                level[u] = -1;
                let e = path
                    .pop()
                    .expect("non-source node has an incoming path edge");
                u = self.to[e ^ 1];
                iter[u] += 1;
            }
        }
        total
    }

    /// Nodes reachable from `s` through unsaturated residual edges.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let eps = self.eps();
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > eps {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Nodes that can still reach `t` through unsaturated residual edges.
    pub fn sink_side(&self, t: usize) -> Vec<bool> {
        let eps = self.eps();
        let mut seen = vec![false; self.adj.len()];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            // edge e: u -> v lives at index e; from v's adjacency we see e ^ 1
            for &back in &self.adj[v] {
                let e = back ^ 1;
                let u = self.to[back];
                if !seen[u] && self.cap[e] > eps {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Pseudo-boolean energy with unary and pairwise terms, minimized exactly by
/// a single min-cut when every pairwise term is submodular.
///
/// Label `false` = node on the source side, `true` = sink side.
#[derive(Debug, Clone)]
pub struct BinaryEnergy {
    graph: FlowGraph,
    constant: f64,
    source: usize,
    sink: usize,
    vars: usize,
}

impl BinaryEnergy {
    pub fn new(vars: usize) -> Self {
        Self {
            graph: FlowGraph::new(vars + 2),
            constant: 0.0,
            source: vars,
            sink: vars + 1,
            vars,
        }
    }

    /// Adds `e0` if `x_i = false`, `e1` if `x_i = true`.
    pub fn add_unary(&mut self, i: usize, e0: f64, e1: f64) {
        if e1 >= e0 {
            self.constant += e0;
            if e1 > e0 {
                self.graph.add_edge(self.source, i, e1 - e0, 0.0);
            }
        } else {
            self.constant += e1;
            self.graph.add_edge(i, self.sink, e0 - e1, 0.0);
        }
    }

    /// Adds `E(x_i, x_j)` given as `a = E(0,0)`, `b = E(0,1)`, `c = E(1,0)`,
    /// `d = E(1,1)`. Requires `b + c >= a + d`.
    pub fn add_pairwise(&mut self, i: usize, j: usize, a: f64, b: f64, c: f64, d: f64) {
        let coupling = b + c - a - d;
        debug_assert!(
            coupling >= -1e-9 * (1.0 + a.abs() + d.abs()),
            "non-submodular pairwise term"
        );
        self.constant += a;
        self.add_unary(i, 0.0, c - a);
        self.add_unary(j, 0.0, d - c);
        if coupling > 0.0 {
            self.graph.add_edge(i, j, coupling, 0.0);
        }
    }

    /// Returns the minimizing labeling and its energy. Among minimizers the
    /// one with the fewest `true` labels is chosen.
    pub fn minimize(mut self) -> (Vec<bool>, f64) {
        let flow = self.graph.max_flow(self.source, self.sink);
        let to_sink = self.graph.sink_side(self.sink);
        (to_sink[..self.vars].to_vec(), self.constant + flow)
    }
}
