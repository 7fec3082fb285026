use std::fmt;

use super::{split, split_ref, traverse, Expanded, Shape, DEFAULT_DEPTH_LIMIT};
use crate::error::DepthExceeded;

/// The recursive closure of a shape: every slot holds another `Fixpoint`.
///
/// The node is always present outside of `Drop`; the `Option` only lets
/// drop take subtrees apart without recursing.
pub struct Fixpoint<S: Shape> {
    node: Option<Box<S::Of<Fixpoint<S>>>>,
}

impl<S: Shape> Fixpoint<S> {
    pub fn wrap(node: S::Of<Self>) -> Self {
        Fixpoint {
            node: Some(Box::new(node)),
        }
    }

    pub fn unwrap(mut self) -> S::Of<Self> {
        *self.node.take().expect("fixpoint node is present")
    }

    pub fn node(&self) -> &S::Of<Self> {
        self.node.as_deref().expect("fixpoint node is present")
    }

    /// Number of nested constructors along the deepest path.
    pub fn depth(&self) -> usize {
        fold_ref(
            |node: S::Of<usize>| {
                let (_, children) = split::<S, usize>(node);
                1 + children.into_iter().max().unwrap_or(0)
            },
            self,
        )
    }
}

impl<S: Shape> Drop for Fixpoint<S> {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        if let Some(node) = self.node.take() {
            S::map_slots(*node, |child| stack.push(child));
        }
        while let Some(mut child) = stack.pop() {
            if let Some(node) = child.node.take() {
                S::map_slots(*node, |grandchild| stack.push(grandchild));
            }
        }
    }
}

impl<S: Shape> Clone for Fixpoint<S> {
    fn clone(&self) -> Self {
        fold_ref(Fixpoint::wrap, self)
    }
}

impl<S: Shape> PartialEq for Fixpoint<S>
where
    S::Of<()>: PartialEq,
{
    fn eq(&self, other: &Self) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            let (skel_a, kids_a) = split_ref::<S, _>(a.node());
            let (skel_b, kids_b) = split_ref::<S, _>(b.node());
            if skel_a != skel_b || kids_a.len() != kids_b.len() {
                return false;
            }
            stack.extend(kids_a.into_iter().zip(kids_b));
        }
        true
    }
}

impl<S: Shape> fmt::Debug for Fixpoint<S>
where
    S::Of<()>: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (skeleton, children) = split_ref::<S, _>(self.node());
        let mut t = f.debug_tuple("In");
        t.field(&skeleton);
        for child in children {
            t.field(child);
        }
        t.finish()
    }
}

/// Catamorphism: collapses a structure innermost-first with `alg`.
pub fn fold<S: Shape, R>(alg: impl FnMut(S::Of<R>) -> R, structure: Fixpoint<S>) -> R {
    let result = traverse::<S, Fixpoint<S>, R, DepthExceeded>(
        structure,
        None,
        |fix| {
            let (skeleton, children) = split::<S, _>(fix.unwrap());
            Ok(Expanded::Node(skeleton, children))
        },
        alg,
    );
    match result {
        Ok(r) => r,
        Err(_) => unreachable!("unbounded traversal cannot exceed a depth limit"),
    }
}

/// Fold over a borrowed structure; the algebra sees clones of non-slot data.
pub fn fold_ref<S: Shape, R>(alg: impl FnMut(S::Of<R>) -> R, structure: &Fixpoint<S>) -> R {
    let result = traverse::<S, &Fixpoint<S>, R, DepthExceeded>(
        structure,
        None,
        |fix| {
            let (skeleton, children) = split_ref::<S, _>(fix.node());
            Ok(Expanded::Node(skeleton, children))
        },
        alg,
    );
    match result {
        Ok(r) => r,
        Err(_) => unreachable!("unbounded traversal cannot exceed a depth limit"),
    }
}

/// Anamorphism with the default depth bound.
pub fn unfold<S: Shape, B>(
    coalg: impl FnMut(B) -> S::Of<B>,
    seed: B,
) -> Result<Fixpoint<S>, DepthExceeded> {
    unfold_bounded(coalg, seed, DEFAULT_DEPTH_LIMIT)
}

pub fn unfold_bounded<S: Shape, B>(
    mut coalg: impl FnMut(B) -> S::Of<B>,
    seed: B,
    limit: usize,
) -> Result<Fixpoint<S>, DepthExceeded> {
    try_unfold(|b| Ok(coalg(b)), seed, limit)
}

/// Anamorphism with a fallible coalgebra. The coalgebra runs on a node
/// before any of its children.
pub fn try_unfold<S, B, E>(
    mut coalg: impl FnMut(B) -> Result<S::Of<B>, E>,
    seed: B,
    limit: usize,
) -> Result<Fixpoint<S>, E>
where
    S: Shape,
    E: From<DepthExceeded>,
{
    traverse::<S, B, Fixpoint<S>, E>(
        seed,
        Some(limit),
        |b| {
            let (skeleton, seeds) = split::<S, _>(coalg(b)?);
            Ok(Expanded::Node(skeleton, seeds))
        },
        |node| Fixpoint::wrap(node),
    )
}
