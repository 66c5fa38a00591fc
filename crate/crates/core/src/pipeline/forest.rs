use serde::Serialize;

use crate::padic::Residue;
use crate::system::{level_of, System};
use crate::zerosum::FpVec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Primary,
    Secondary,
}

/// A variable of the contraction forest. Leaves are original columns.
#[derive(Clone, Debug, Serialize)]
pub struct VarNode {
    pub id: usize,
    pub kind: NodeKind,
    /// `None` when the coefficient vanishes modulo `p^K`.
    pub level: Option<u32>,
    pub coeff: [Residue; 2],
    pub children: Vec<usize>,
    pub column: Option<usize>,
}

/// Either an untouched original column or a forest node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Item {
    Column(usize),
    Node(usize),
}

pub struct Forest<'a> {
    sys: &'a System,
    nodes: Vec<VarNode>,
    used_columns: Vec<bool>,
    consumed: Vec<bool>,
}

impl<'a> Forest<'a> {
    pub fn new(sys: &'a System) -> Self {
        Forest { sys, nodes: Vec::new(), used_columns: vec![false; sys.len()], consumed: Vec::new() }
    }

    pub fn system(&self) -> &'a System {
        self.sys
    }

    pub fn nodes(&self) -> &[VarNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &VarNode {
        &self.nodes[id]
    }

    pub fn coeff(&self, item: Item) -> [Residue; 2] {
        match item {
            Item::Column(i) => self.sys.column(i),
            Item::Node(n) => self.nodes[n].coeff,
        }
    }

    pub fn level(&self, item: Item) -> Option<u32> {
        match item {
            Item::Column(i) => self.sys.level(i),
            Item::Node(n) => self.nodes[n].level,
        }
    }

    /// `coeff / p^level` reduced mod `p^e`, entrywise.
    pub fn scaled(&self, item: Item, level: u32, e: u32) -> [u128; 2] {
        let q = self.sys.modulus().p_pow(level);
        let top = (self.sys.p() as u128).pow(e);
        self.coeff(item).map(|x| x.value() / q % top)
    }

    pub fn reduced(&self, item: Item, level: u32) -> FpVec2 {
        self.scaled(item, level, 1).map(|x| x as u64)
    }

    fn leaf(&mut self, column: usize) -> usize {
        assert!(!self.used_columns[column], "column {column} contracted twice");
        self.used_columns[column] = true;
        let coeff = self.sys.column(column);
        self.push(VarNode {
            id: 0,
            kind: NodeKind::Secondary,
            level: level_of(self.sys.modulus(), coeff).ok(),
            coeff,
            children: Vec::new(),
            column: Some(column),
        })
    }

    fn push(&mut self, mut node: VarNode) -> usize {
        node.id = self.nodes.len();
        self.nodes.push(node);
        self.consumed.push(false);
        self.nodes.len() - 1
    }

    /// New node whose coefficient is the exact sum of the inputs'.
    pub fn contract(&mut self, items: &[Item], kind: NodeKind) -> usize {
        let m = *self.sys.modulus();
        let mut children = Vec::with_capacity(items.len());
        let mut coeff = [Residue::ZERO; 2];
        for &item in items {
            let id = match item {
                Item::Column(i) => self.leaf(i),
                Item::Node(n) => n,
            };
            assert!(!self.consumed[id], "node {id} contracted twice");
            self.consumed[id] = true;
            let c = self.nodes[id].coeff;
            coeff = [m.add(coeff[0], c[0]), m.add(coeff[1], c[1])];
            children.push(id);
        }
        let level = level_of(&m, coeff).ok();
        self.push(VarNode { id: 0, kind, level, coeff, children, column: None })
    }

    /// Original columns under `id`.
    pub fn leaves(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            match node.column {
                Some(c) => out.push(c),
                None => stack.extend(&node.children),
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether every node's coefficient is the sum of its leaves' columns
    /// and its level matches that coefficient.
    pub fn check_exact(&self) -> Result<(), String> {
        let m = self.sys.modulus();
        for node in &self.nodes {
            let mut sum = [Residue::ZERO; 2];
            for c in self.leaves(node.id) {
                let col = self.sys.column(c);
                sum = [m.add(sum[0], col[0]), m.add(sum[1], col[1])];
            }
            if sum != node.coeff {
                return Err(format!("node {} coefficient differs from its leaf sum", node.id));
            }
            if level_of(m, node.coeff).ok() != node.level {
                return Err(format!("node {} has a stale level", node.id));
            }
        }
        Ok(())
    }
}
