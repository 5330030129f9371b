use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::semiring::Semiring;

/// Role of a node inside its component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Internal,
    Entry,
    Exit,
    /// Call node of the box.
    Call(usize),
    /// Return node of the box.
    Return(usize),
}

/// An invocation site: a box of `owner` that runs component `callee`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxSite {
    pub owner: usize,
    pub callee: usize,
    pub call: usize,
    pub ret: usize,
}

/// A node of a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc {
    pub csm: usize,
    pub node: usize,
}

impl Loc {
    pub fn new(csm: usize, node: usize) -> Self {
        Loc { csm, node }
    }
}

/// A configuration: a node together with the stack of boxes entered to reach it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub csm: usize,
    pub node: usize,
    pub stack: Vec<usize>,
}

/// One single-entry single-exit component state machine.
#[derive(Debug, Clone)]
pub struct Component<W> {
    name: String,
    kinds: Vec<NodeKind>,
    entry: usize,
    exit: usize,
    boxes: Vec<usize>,
    edges: Vec<(usize, usize, W)>,
    names: Option<Vec<String>>,
}

impl<W> Component<W> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.kinds.len()
    }

    pub fn entry(&self) -> usize {
        self.entry
    }

    pub fn exit(&self) -> usize {
        self.exit
    }

    pub fn kind(&self, u: usize) -> NodeKind {
        self.kinds[u]
    }

    /// Boxes placed in this component, by global box id.
    pub fn boxes(&self) -> &[usize] {
        &self.boxes
    }

    /// User edges, without the derived call-to-return edges.
    pub fn edges(&self) -> &[(usize, usize, W)] {
        &self.edges
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn label(&self, u: usize) -> String {
        match &self.names {
            Some(names) => names[u].clone(),
            None => u.to_string(),
        }
    }
}

/// A recursive state machine with single-entry single-exit components.
#[derive(Debug, Clone)]
pub struct Rsm<W> {
    components: Vec<Component<W>>,
    boxes: Vec<BoxSite>,
    box_labels: Vec<String>,
}

impl<W> Default for Rsm<W> {
    fn default() -> Self {
        Rsm {
            components: Vec::new(),
            boxes: Vec::new(),
            box_labels: Vec::new(),
        }
    }
}

fn structure<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Structure(msg.into()))
}

impl<W: Clone> Rsm<W> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a component with nodes `0..n`; returns its index.
    pub fn add_component(&mut self, name: impl Into<String>, n: usize, entry: usize, exit: usize) -> Result<usize> {
        let name = name.into();
        for x in [entry, exit] {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, limit: n });
            }
        }
        if entry == exit {
            return structure(format!("component {name}: entry and exit must differ"));
        }
        if self.components.iter().any(|c| c.name == name) {
            return structure(format!("duplicate component {name}"));
        }
        let mut kinds = vec![NodeKind::Internal; n];
        kinds[entry] = NodeKind::Entry;
        kinds[exit] = NodeKind::Exit;
        self.components.push(Component {
            name,
            kinds,
            entry,
            exit,
            boxes: Vec::new(),
            edges: Vec::new(),
            names: None,
        });
        Ok(self.components.len() - 1)
    }

    fn check_component(&self, c: usize) -> Result<()> {
        if c >= self.components.len() {
            return structure(format!("no component with index {c}"));
        }
        Ok(())
    }

    /// Adds a box with fresh call and return nodes appended to `owner`.
    pub fn add_box(&mut self, owner: usize, callee: usize) -> Result<usize> {
        self.check_component(owner)?;
        let n = self.components[owner].n();
        self.add_box_labeled_fresh(owner, callee, n, None)
    }

    pub(crate) fn add_box_labeled_fresh(
        &mut self,
        owner: usize,
        callee: usize,
        n: usize,
        label: Option<String>,
    ) -> Result<usize> {
        self.check_component(callee)?;
        let comp = &mut self.components[owner];
        comp.kinds.push(NodeKind::Internal);
        comp.kinds.push(NodeKind::Internal);
        if let Some(names) = comp.names.as_mut() {
            names.push(n.to_string());
            names.push((n + 1).to_string());
        }
        self.add_box_labeled(owner, callee, n, n + 1, label)
    }

    /// Adds a box whose call and return nodes are existing internal nodes.
    pub fn add_box_at(&mut self, owner: usize, callee: usize, call: usize, ret: usize) -> Result<usize> {
        self.add_box_labeled(owner, callee, call, ret, None)
    }

    pub(crate) fn add_box_labeled(
        &mut self,
        owner: usize,
        callee: usize,
        call: usize,
        ret: usize,
        label: Option<String>,
    ) -> Result<usize> {
        self.check_component(owner)?;
        self.check_component(callee)?;
        let b = self.boxes.len();
        let label = label.unwrap_or_else(|| b.to_string());
        if self.box_labels.contains(&label) {
            return structure(format!("duplicate box {label}"));
        }
        let comp = &mut self.components[owner];
        for x in [call, ret] {
            if x >= comp.n() {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    limit: comp.n(),
                });
            }
        }
        if call == ret || comp.kinds[call] != NodeKind::Internal || comp.kinds[ret] != NodeKind::Internal {
            return structure(format!("box {label}: call and return must be distinct internal nodes"));
        }
        if comp.edges.iter().any(|&(u, v, _)| u == call || v == ret) {
            return structure(format!(
                "box {label}: existing edges leave the call node or enter the return node"
            ));
        }
        comp.kinds[call] = NodeKind::Call(b);
        comp.kinds[ret] = NodeKind::Return(b);
        comp.boxes.push(b);
        self.boxes.push(BoxSite {
            owner,
            callee,
            call,
            ret,
        });
        self.box_labels.push(label);
        Ok(b)
    }

    /// Adds an internal edge; its endpoints must respect the component's entry,
    /// exit, call and return roles.
    pub fn add_edge(&mut self, c: usize, u: usize, v: usize, w: W) -> Result<()> {
        self.check_component(c)?;
        let comp = &mut self.components[c];
        for x in [u, v] {
            if x >= comp.n() {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    limit: comp.n(),
                });
            }
        }
        let src_ok = matches!(
            comp.kinds[u],
            NodeKind::Internal | NodeKind::Entry | NodeKind::Return(_)
        );
        let dst_ok = matches!(comp.kinds[v], NodeKind::Internal | NodeKind::Exit | NodeKind::Call(_));
        if !src_ok || !dst_ok {
            return structure(format!(
                "component {}: edge {}->{} goes from {:?} to {:?}",
                comp.name,
                comp.label(u),
                comp.label(v),
                comp.kinds[u],
                comp.kinds[v]
            ));
        }
        comp.edges.push((u, v, w));
        Ok(())
    }

    pub fn set_node_names(&mut self, c: usize, names: Vec<String>) -> Result<()> {
        self.check_component(c)?;
        let comp = &mut self.components[c];
        if names.len() != comp.n() {
            return structure(format!(
                "component {}: {} names for {} nodes",
                comp.name,
                names.len(),
                comp.n()
            ));
        }
        comp.names = Some(names);
        Ok(())
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &Component<W> {
        &self.components[c]
    }

    pub fn components(&self) -> &[Component<W>] {
        &self.components
    }

    pub fn boxes(&self) -> &[BoxSite] {
        &self.boxes
    }

    pub fn box_site(&self, b: usize) -> BoxSite {
        self.boxes[b]
    }

    pub fn box_label(&self, b: usize) -> &str {
        &self.box_labels[b]
    }

    /// Component by name or index.
    pub fn find_component(&self, token: &str) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.name == token)
            .or_else(|| token.parse().ok().filter(|&i| i < self.components.len()))
    }

    /// Node of component `c` by name, `call:<box>`, `ret:<box>` or index.
    pub fn resolve_node(&self, c: usize, token: &str) -> Option<usize> {
        let comp = self.components.get(c)?;
        if let Some((role, label)) = token.split_once(':') {
            let b = self.box_labels.iter().position(|l| l == label)?;
            let site = self.boxes[b];
            if site.owner != c {
                return None;
            }
            return match role {
                "call" => Some(site.call),
                "ret" => Some(site.ret),
                _ => None,
            };
        }
        if let Some(names) = &comp.names {
            if let Some(i) = names.iter().position(|s| s == token) {
                return Some(i);
            }
        }
        token.parse().ok().filter(|&i| i < comp.n())
    }

    /// Resolves `node` in the default component or `csm@node`.
    pub fn resolve(&self, default: Option<usize>, token: &str) -> Option<Loc> {
        if let Some((c, node)) = token.split_once('@') {
            let c = self.find_component(c)?;
            return self.resolve_node(c, node).map(|u| Loc::new(c, u));
        }
        let c = default?;
        self.resolve_node(c, token).map(|u| Loc::new(c, u))
    }

    /// Components with at least one box, per callee: `(caller, boxes)`.
    pub fn callers(&self) -> Vec<Vec<(usize, Vec<usize>)>> {
        let mut out: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); self.components.len()];
        for (b, site) in self.boxes.iter().enumerate() {
            let list = &mut out[site.callee];
            match list.iter_mut().find(|(j, _)| *j == site.owner) {
                Some((_, bs)) => bs.push(b),
                None => list.push((site.owner, vec![b])),
            }
        }
        for list in &mut out {
            list.sort_by_key(|(j, _)| *j);
        }
        out
    }

    /// The control-flow graph of component `c`: its edges plus a call-to-return
    /// edge of weight `0` for every box.
    pub fn derived_graph<S: Semiring<Value = W>>(&self, sr: &S, c: usize) -> Result<WeightedGraph<W>> {
        self.check_component(c)?;
        let comp = &self.components[c];
        let mut edges: Vec<(usize, usize, W)> = comp.edges.clone();
        for &b in &comp.boxes {
            let site = self.boxes[b];
            edges.push((site.call, site.ret, sr.zero()));
        }
        let mut g = WeightedGraph::from_edges(sr, comp.n(), edges)?;
        if let Some(names) = &comp.names {
            g.set_names(names.clone())?;
        }
        Ok(g)
    }

    pub fn map_weights<V: Clone>(&self, mut f: impl FnMut(&W) -> V) -> Rsm<V> {
        Rsm {
            components: self
                .components
                .iter()
                .map(|c| Component {
                    name: c.name.clone(),
                    kinds: c.kinds.clone(),
                    entry: c.entry,
                    exit: c.exit,
                    boxes: c.boxes.clone(),
                    edges: c.edges.iter().map(|(u, v, w)| (*u, *v, f(w))).collect(),
                    names: c.names.clone(),
                })
                .collect(),
            boxes: self.boxes.clone(),
            box_labels: self.box_labels.clone(),
        }
    }
}
