use std::fmt;

use super::{
    fold, refill, split, split_ref, traverse, Expanded, Fixpoint, Shape, DEFAULT_DEPTH_LIMIT,
};
use crate::error::DepthExceeded;

/// One level of a [`Program`]: a returned value or a shape step.
pub enum ProgramNode<S: Shape, A> {
    Pure(A),
    Step(S::Of<Program<S, A>>),
}

/// A shape structure with `Pure` leaves; sequencing with
/// [`Program::and_then`] splices new structure in at those leaves.
pub struct Program<S: Shape, A> {
    node: Option<Box<ProgramNode<S, A>>>,
}

impl<S: Shape, A> Program<S, A> {
    pub fn pure(value: A) -> Self {
        Program {
            node: Some(Box::new(ProgramNode::Pure(value))),
        }
    }

    pub fn step(layer: S::Of<Self>) -> Self {
        Program {
            node: Some(Box::new(ProgramNode::Step(layer))),
        }
    }

    pub fn view(&self) -> &ProgramNode<S, A> {
        self.node.as_deref().expect("program node is present")
    }

    pub fn into_view(mut self) -> ProgramNode<S, A> {
        *self.node.take().expect("program node is present")
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.view(), ProgramNode::Pure(_))
    }

    /// Monadic bind: every `Pure(a)` leaf is replaced by `k(a)`.
    pub fn and_then<B>(self, k: impl FnMut(A) -> Program<S, B>) -> Program<S, B> {
        sequence(self, k)
    }

    /// Sequences `next` after this program, discarding the returned values.
    pub fn then<B: Clone>(self, next: Program<S, B>) -> Program<S, B> {
        sequence(self, move |_| next.clone())
    }

    /// Embeds a `Fixpoint` as a program with no `Pure` leaves.
    pub fn from_fixpoint(structure: Fixpoint<S>) -> Self {
        fold(Program::step, structure)
    }

    /// The inverse of [`Program::from_fixpoint`]; `None` if any `Pure`
    /// leaf is reachable.
    pub fn into_fixpoint(self) -> Option<Fixpoint<S>> {
        eval(
            |node: S::Of<Option<Fixpoint<S>>>| {
                let (skeleton, children) = split::<S, _>(node);
                let children: Option<Vec<_>> = children.into_iter().collect();
                Some(Fixpoint::wrap(refill::<S, _>(skeleton, children?)))
            },
            |_| None,
            self,
        )
    }

    /// Number of nested steps along the deepest path (`Pure` counts as 0).
    pub fn depth(&self) -> usize {
        eval_ref(
            |node: S::Of<usize>| {
                let (_, children) = split::<S, usize>(node);
                1 + children.into_iter().max().unwrap_or(0)
            },
            |_| 0,
            self,
        )
    }
}

impl<S: Shape, A> Drop for Program<S, A> {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        if let Some(node) = self.node.take() {
            if let ProgramNode::Step(layer) = *node {
                S::map_slots(layer, |child| stack.push(child));
            }
        }
        while let Some(mut child) = stack.pop() {
            if let Some(node) = child.node.take() {
                if let ProgramNode::Step(layer) = *node {
                    S::map_slots(layer, |grandchild| stack.push(grandchild));
                }
            }
        }
    }
}

impl<S: Shape, A: Clone> Clone for Program<S, A> {
    fn clone(&self) -> Self {
        eval_ref(Program::step, |a: &A| Program::pure(a.clone()), self)
    }
}

impl<S: Shape, A: PartialEq> PartialEq for Program<S, A>
where
    S::Of<()>: PartialEq,
{
    fn eq(&self, other: &Self) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            match (a.view(), b.view()) {
                (ProgramNode::Pure(x), ProgramNode::Pure(y)) => {
                    if x != y {
                        return false;
                    }
                }
                (ProgramNode::Step(la), ProgramNode::Step(lb)) => {
                    let (skel_a, kids_a) = split_ref::<S, _>(la);
                    let (skel_b, kids_b) = split_ref::<S, _>(lb);
                    if skel_a != skel_b || kids_a.len() != kids_b.len() {
                        return false;
                    }
                    stack.extend(kids_a.into_iter().zip(kids_b));
                }
                _ => return false,
            }
        }
        true
    }
}

impl<S: Shape, A: fmt::Debug> fmt::Debug for Program<S, A>
where
    S::Of<()>: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.view() {
            ProgramNode::Pure(a) => f.debug_tuple("Pure").field(a).finish(),
            ProgramNode::Step(layer) => {
                let (skeleton, children) = split_ref::<S, _>(layer);
                let mut t = f.debug_tuple("Step");
                t.field(&skeleton);
                for child in children {
                    t.field(child);
                }
                t.finish()
            }
        }
    }
}

fn unbounded<R>(result: Result<R, DepthExceeded>) -> R {
    match result {
        Ok(r) => r,
        Err(_) => unreachable!("unbounded traversal cannot exceed a depth limit"),
    }
}

/// Folds a program: `Pure` leaves go through `gen`, steps through `alg`.
pub fn eval<S: Shape, A, R>(
    alg: impl FnMut(S::Of<R>) -> R,
    mut gen: impl FnMut(A) -> R,
    program: Program<S, A>,
) -> R {
    unbounded(traverse::<S, Program<S, A>, R, DepthExceeded>(
        program,
        None,
        |p| {
            Ok(match p.into_view() {
                ProgramNode::Pure(a) => Expanded::Leaf(gen(a)),
                ProgramNode::Step(layer) => {
                    let (skeleton, children) = split::<S, _>(layer);
                    Expanded::Node(skeleton, children)
                }
            })
        },
        alg,
    ))
}

/// [`eval`] over a borrowed program; the algebra sees clones of non-slot data.
pub fn eval_ref<S: Shape, A, R>(
    alg: impl FnMut(S::Of<R>) -> R,
    mut gen: impl FnMut(&A) -> R,
    program: &Program<S, A>,
) -> R {
    unbounded(traverse::<S, &Program<S, A>, R, DepthExceeded>(
        program,
        None,
        |p| {
            Ok(match p.view() {
                ProgramNode::Pure(a) => Expanded::Leaf(gen(a)),
                ProgramNode::Step(layer) => {
                    let (skeleton, children) = split_ref::<S, _>(layer);
                    Expanded::Node(skeleton, children)
                }
            })
        },
        alg,
    ))
}

/// Generates a program from a seed. Generation only stops at zero-slot
/// nodes, so the result contains no `Pure` leaves and `A` is free.
pub fn build<S: Shape, B, A>(
    coalg: impl FnMut(B) -> S::Of<B>,
    seed: B,
) -> Result<Program<S, A>, DepthExceeded> {
    build_bounded(coalg, seed, DEFAULT_DEPTH_LIMIT)
}

pub fn build_bounded<S: Shape, B, A>(
    mut coalg: impl FnMut(B) -> S::Of<B>,
    seed: B,
    limit: usize,
) -> Result<Program<S, A>, DepthExceeded> {
    try_build(|b| Ok(coalg(b)), seed, limit)
}

pub fn try_build<S, B, A, E>(
    mut coalg: impl FnMut(B) -> Result<S::Of<B>, E>,
    seed: B,
    limit: usize,
) -> Result<Program<S, A>, E>
where
    S: Shape,
    E: From<DepthExceeded>,
{
    traverse::<S, B, Program<S, A>, E>(
        seed,
        Some(limit),
        |b| {
            let (skeleton, seeds) = split::<S, _>(coalg(b)?);
            Ok(Expanded::Node(skeleton, seeds))
        },
        Program::step,
    )
}

/// Monadic bind for programs: `Pure(a)` becomes `k(a)`, steps are kept.
pub fn sequence<S: Shape, A, B>(
    program: Program<S, A>,
    k: impl FnMut(A) -> Program<S, B>,
) -> Program<S, B> {
    eval(Program::step, k, program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::list::{ListF, ListShape};

    type P<A> = Program<ListShape<i64>, A>;

    fn cons<A>(x: i64, rest: P<A>) -> P<A> {
        Program::step(ListF::ConsF(x, rest))
    }

    fn nil<A>() -> P<A> {
        Program::step(ListF::NilF)
    }

    fn sum(node: ListF<i64, i64>) -> i64 {
        match node {
            ListF::NilF => 0,
            ListF::ConsF(a, k) => a + k,
        }
    }

    fn countdown(n: i64) -> ListF<i64, i64> {
        if n == 0 {
            ListF::NilF
        } else {
            ListF::ConsF(n, n - 1)
        }
    }

    #[test]
    fn eval_single_step_with_zero_generator() {
        assert_eq!(eval(sum, |()| 0, cons(5, Program::pure(()))), 5);
    }

    #[test]
    fn eval_pure_uses_generator() {
        assert_eq!(eval(sum, |a: i64| a * 10, P::pure(4)), 40);
    }

    #[test]
    fn build_countdown() {
        let built: P<()> = build(countdown, 2).unwrap();
        assert_eq!(built, cons(2, cons(1, nil())));
        let empty: P<()> = build(countdown, 0).unwrap();
        assert_eq!(empty, nil());
        let three: P<()> = build(countdown, 3).unwrap();
        assert_eq!(eval(sum, |()| 0, three), 6);
    }

    #[test]
    fn build_fails_on_divergence() {
        let err = build_bounded::<ListShape<i64>, _, ()>(|n: i64| ListF::ConsF(n, n + 1), 0, 50)
            .unwrap_err();
        assert_eq!(err.limit, 50);
    }

    #[test]
    fn sequence_left_identity() {
        let k = |x: i64| cons(x, nil::<()>());
        assert_eq!(sequence(P::pure(3), k), k(3));
    }

    #[test]
    fn sequence_single_splice() {
        let p = cons(1, P::pure(()));
        assert_eq!(sequence(p, |()| nil::<()>()), cons(1, nil()));
    }

    #[test]
    fn sequence_extends_only_at_leaves() {
        let p = cons(1, cons(2, P::pure(7)));
        let q = p.and_then(|x| cons(x, P::pure(x + 1)));
        assert_eq!(q, cons(1, cons(2, cons(7, P::pure(8)))));
    }

    #[test]
    fn fixpoint_round_trip() {
        let fix = crate::recursion::list::from_slice(&[3i64, 1, 4]);
        let prog: P<()> = Program::from_fixpoint(fix.clone());
        assert_eq!(prog.depth(), 4);
        assert_eq!(prog.into_fixpoint().unwrap(), fix);
        assert!(cons(1, P::pure(())).into_fixpoint().is_none());
    }

    #[test]
    fn deep_programs_drop_iteratively() {
        let p: P<()> = build(countdown, 200_000).unwrap();
        assert_eq!(p.depth(), 200_001);
        let q = p.clone();
        assert!(p == q);
    }
}
