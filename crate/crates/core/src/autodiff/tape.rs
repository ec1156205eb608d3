//! Reverse-mode differentiation over a recorded computation.
//!
//! Every operation on a [`Var`] appends a [`TapeNode`] holding its value and
//! the local partial derivatives with respect to its parents. Nodes are only
//! ever appended, so parents always precede children and a single backward
//! pass over the node list propagates adjoints from the root to the leaves.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{Scalar, UnaryFn};
use crate::error::{PinnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpTag {
    Input,
    Param,
    Constant,
    Add,
    Sub,
    Mul,
    Neg,
    Shift,
    Scale,
    Unary,
    Lifted,
}

#[derive(Debug, Clone)]
pub struct TapeNode {
    pub value: f64,
    pub adjoint: f64,
    parents: [(usize, f64); 2],
    arity: u8,
    pub op: OpTag,
}

impl TapeNode {
    pub fn parents(&self) -> &[(usize, f64)] {
        &self.parents[..self.arity as usize]
    }
}

#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<TapeNode>>,
    params: RefCell<Vec<usize>>,
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tape")
            .field("nodes", &self.len())
            .field("params", &self.params.borrow().len())
            .finish()
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, value: f64, op: OpTag, parents: &[(usize, f64)]) -> Var<'_> {
        let mut slots = [(0usize, 0.0); 2];
        slots[..parents.len()].copy_from_slice(parents);
        let mut nodes = self.nodes.borrow_mut();
        let index = nodes.len();
        nodes.push(TapeNode {
            value,
            adjoint: 0.0,
            parents: slots,
            arity: parents.len() as u8,
            op,
        });
        Var {
            tape: self,
            index,
            value,
        }
    }

    /// A differentiable leaf that is not reported as a parameter.
    pub fn input(&self, value: f64) -> Var<'_> {
        self.push(value, OpTag::Input, &[])
    }

    /// A parameter leaf; gradients are reported for these in registration order.
    pub fn param(&self, value: f64) -> Var<'_> {
        let v = self.push(value, OpTag::Param, &[]);
        self.params.borrow_mut().push(v.index);
        v
    }

    pub fn constant(&self, value: f64) -> Var<'_> {
        self.push(value, OpTag::Constant, &[])
    }

    pub fn node(&self, index: usize) -> Option<TapeNode> {
        self.nodes.borrow().get(index).cloned()
    }

    /// Reverse sweep seeded with 1 at `root`.
    ///
    /// Adjoints are reset before every sweep, so repeated calls on the same
    /// tape give identical results.
    pub fn grad(&self, root: Var<'_>) -> Result<Gradients> {
        let mut nodes = self.nodes.borrow_mut();
        if nodes.is_empty() {
            return Err(PinnError::Usage("reverse sweep on an empty tape".into()));
        }
        if !std::ptr::eq(root.tape, self) || root.index >= nodes.len() {
            return Err(PinnError::Usage("root does not belong to this tape".into()));
        }
        for node in nodes.iter_mut() {
            node.adjoint = 0.0;
        }
        nodes[root.index].adjoint = 1.0;
        for i in (0..=root.index).rev() {
            let adj = nodes[i].adjoint;
            if adj == 0.0 {
                continue;
            }
            let arity = nodes[i].arity as usize;
            let parents = nodes[i].parents;
            for &(p, partial) in &parents[..arity] {
                nodes[p].adjoint += adj * partial;
            }
        }
        Ok(Gradients {
            adjoints: nodes.iter().map(|n| n.adjoint).collect(),
            params: self.params.borrow().clone(),
        })
    }
}

/// Adjoints produced by one reverse sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    adjoints: Vec<f64>,
    params: Vec<usize>,
}

impl Gradients {
    /// `d root / d var`; zero for nodes the root does not depend on.
    pub fn wrt(&self, var: Var<'_>) -> f64 {
        self.adjoints.get(var.index).copied().unwrap_or(0.0)
    }

    /// Gradient with respect to every registered parameter, in registration order.
    pub fn params(&self) -> Vec<f64> {
        self.params.iter().map(|&i| self.adjoints[i]).collect()
    }
}

/// A handle to a node on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    index: usize,
    value: f64,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var(#{} = {})", self.index, self.value)
    }
}

impl<'t> Var<'t> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn tape(&self) -> &'t Tape {
        self.tape
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self {
        self.tape.push(
            self.value + rhs.value,
            OpTag::Add,
            &[(self.index, 1.0), (rhs.index, 1.0)],
        )
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self {
        self.tape.push(
            self.value - rhs.value,
            OpTag::Sub,
            &[(self.index, 1.0), (rhs.index, -1.0)],
        )
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self {
        self.tape.push(
            self.value * rhs.value,
            OpTag::Mul,
            &[(self.index, rhs.value), (rhs.index, self.value)],
        )
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self {
        self.tape.push(-self.value, OpTag::Neg, &[(self.index, -1.0)])
    }
}

impl<'t> Add<f64> for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: f64) -> Self {
        self.tape
            .push(self.value + rhs, OpTag::Shift, &[(self.index, 1.0)])
    }
}

impl<'t> Sub<f64> for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: f64) -> Self {
        self.tape
            .push(self.value - rhs, OpTag::Shift, &[(self.index, 1.0)])
    }
}

impl<'t> Mul<f64> for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: f64) -> Self {
        self.tape
            .push(self.value * rhs, OpTag::Scale, &[(self.index, rhs)])
    }
}

impl Scalar for Var<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn constant(&self, c: f64) -> Self {
        self.tape.constant(c)
    }

    fn unary(self, f: &dyn UnaryFn) -> [Self; 3] {
        let [g, d1, d2, d3] = f.derivs(self.value);
        let tape = self.tape;
        [
            tape.push(g, OpTag::Unary, &[(self.index, d1)]),
            tape.push(d1, OpTag::Unary, &[(self.index, d2)]),
            tape.push(d2, OpTag::Unary, &[(self.index, d3)]),
        ]
    }

    fn lift2(a: Self, b: Self, value: f64, da: f64, db: f64) -> Self {
        a.tape
            .push(value, OpTag::Lifted, &[(a.index, da), (b.index, db)])
    }
}
