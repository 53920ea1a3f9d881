//! SCC, bottom-SCC and maximal-end-component decompositions, plus
//! qualitative reachability.

/// Strongly connected components of a digraph given by adjacency lists.
///
/// Iterative Tarjan. Each component is sorted; components are ordered by
/// their smallest member.
pub fn digraph_sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out.sort_by_key(|c| c[0]);
    out
}

/// Transition structure of an MDP (or, with at most one choice per state, an
/// MC): `choices[s][c]` lists the successors of state `s` under choice `c`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MdpGraph {
    choices: Vec<Vec<Vec<usize>>>,
}

impl MdpGraph {
    pub fn new(mut choices: Vec<Vec<Vec<usize>>>) -> Self {
        let n = choices.len();
        for succ in choices.iter_mut().flatten() {
            succ.sort_unstable();
            succ.dedup();
            assert!(succ.iter().all(|&t| t < n), "successor out of range");
        }
        MdpGraph { choices }
    }

    /// A Markov chain graph: one choice per state with outgoing edges.
    pub fn from_adjacency(adj: Vec<Vec<usize>>) -> Self {
        Self::new(adj.into_iter().map(|s| if s.is_empty() { vec![] } else { vec![s] }).collect())
    }

    pub fn num_states(&self) -> usize {
        self.choices.len()
    }

    pub fn choices(&self, s: usize) -> &[Vec<usize>] {
        &self.choices[s]
    }

    fn adjacency(&self, allowed: Option<&[Vec<bool>]>) -> Vec<Vec<usize>> {
        (0..self.num_states())
            .map(|s| {
                let mut succ: Vec<usize> = self.choices[s]
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| allowed.is_none_or(|a| a[s][*c]))
                    .flat_map(|(_, t)| t.iter().copied())
                    .collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect()
    }

    fn all_allowed(&self) -> Vec<Vec<bool>> {
        self.choices.iter().map(|c| vec![true; c.len()]).collect()
    }
}

/// A set of states together with the choices enabled at each of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Sorted state indices.
    pub states: Vec<usize>,
    /// `enabled[i]` are the choice indices of `states[i]` inside the component.
    pub enabled: Vec<Vec<usize>>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.states.binary_search(&s).is_ok()
    }

    /// Enabled choices of `s`, or `None` if `s` is not in the component.
    pub fn enabled_at(&self, s: usize) -> Option<&[usize]> {
        self.states.binary_search(&s).ok().map(|i| self.enabled[i].as_slice())
    }

    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &s in &self.states {
            m[s] = true;
        }
        m
    }
}

/// Bottom SCCs of the graph spanned by all choices. Absorbing states (no
/// outgoing edge) never form a component.
pub fn bsccs(g: &MdpGraph) -> Vec<Component> {
    let adj = g.adjacency(None);
    let sccs = digraph_sccs(&adj);
    let mut comp_of = vec![0; g.num_states()];
    for (i, c) in sccs.iter().enumerate() {
        for &s in c {
            comp_of[s] = i;
        }
    }
    sccs.into_iter()
        .enumerate()
        .filter(|(i, c)| {
            let closed = c.iter().all(|&s| adj[s].iter().all(|&t| comp_of[t] == *i));
            let cyclic = c.len() > 1 || adj[c[0]].contains(&c[0]);
            closed && cyclic
        })
        .map(|(_, states)| {
            let enabled = states.iter().map(|&s| (0..g.choices(s).len()).collect()).collect();
            Component { states, enabled }
        })
        .collect()
}

/// Maximal end components.
pub fn mecs(g: &MdpGraph) -> Vec<Component> {
    mecs_restricted(g, &g.all_allowed())
}

/// Maximal end components of the sub-MDP that only uses choices marked in
/// `allowed` (indexed like [`MdpGraph::choices`]).
pub fn mecs_restricted(g: &MdpGraph, allowed: &[Vec<bool>]) -> Vec<Component> {
    let n = g.num_states();
    let mut allowed = allowed.to_vec();
    let mut alive: Vec<bool> = (0..n).map(|s| allowed[s].iter().any(|&a| a)).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            for c in 0..allowed[s].len() {
                if allowed[s][c] && (!alive[s] || g.choices[s][c].iter().any(|&t| !alive[t])) {
                    allowed[s][c] = false;
                    changed = true;
                }
            }
        }
        let adj = g.adjacency(Some(&allowed));
        let sccs = digraph_sccs(&adj);
        let mut comp_of = vec![0; n];
        for (i, c) in sccs.iter().enumerate() {
            for &s in c {
                comp_of[s] = i;
            }
        }
        for s in 0..n {
            for c in 0..allowed[s].len() {
                if allowed[s][c] && g.choices[s][c].iter().any(|&t| comp_of[t] != comp_of[s]) {
                    allowed[s][c] = false;
                    changed = true;
                }
            }
            if alive[s] && !allowed[s].iter().any(|&a| a) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            return sccs
                .into_iter()
                .filter(|c| alive[c[0]])
                .map(|states| {
                    let enabled = states
                        .iter()
                        .map(|&s| (0..allowed[s].len()).filter(|&c| allowed[s][c]).collect())
                        .collect();
                    Component { states, enabled }
                })
                .collect();
        }
    }
}

/// States from which some scheduler reaches `target` with probability one
/// (for an MC: states reaching `target` almost surely).
pub fn prob1_reach(g: &MdpGraph, target: &[bool]) -> Vec<bool> {
    let n = g.num_states();
    let mut u = vec![true; n];
    loop {
        let mut r = target.to_vec();
        loop {
            let mut changed = false;
            for s in 0..n {
                if r[s] || !u[s] {
                    continue;
                }
                let ok = g.choices[s]
                    .iter()
                    .any(|succ| succ.iter().all(|&t| u[t]) && succ.iter().any(|&t| r[t]));
                if ok {
                    r[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if r == u {
            return u;
        }
        u = r;
    }
}

/// States from which `target` is reachable under some scheduler.
pub fn can_reach(g: &MdpGraph, target: &[bool]) -> Vec<bool> {
    let n = g.num_states();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for succ in &g.choices[s] {
            for &t in succ {
                pred[t].push(s);
            }
        }
    }
    let mut seen = target.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    while let Some(t) = stack.pop() {
        for &s in &pred[t] {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// States from which some scheduler avoids `avoid` forever (the complement of
/// the states that cannot avoid reaching it).
pub fn can_avoid(g: &MdpGraph, avoid: &[bool]) -> Vec<bool> {
    let n = g.num_states();
    let mut safe: Vec<bool> = (0..n).map(|s| !avoid[s]).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if safe[s] && !g.choices[s].iter().any(|succ| succ.iter().all(|&t| safe[t])) {
                safe[s] = false;
                changed = true;
            }
        }
        if !changed {
            return safe;
        }
    }
}
