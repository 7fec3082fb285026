//! Structured recursion over one-level shapes.
//!
//! A [`Shape`] is a non-recursive constructor whose recursive positions
//! ("slots") are abstracted into a type parameter. [`Fixpoint`] closes a
//! shape into a finite recursive value and [`Program`] additionally allows
//! `Pure` leaves that can be sequenced. Folds and unfolds over both are
//! driven by an explicit stack, so the depth of a structure never depends on
//! the depth of the native call stack.

mod coproduct;
mod fixpoint;
pub mod list;
mod program;

pub use coproduct::{Coproduct, Here, InLeft, InRight, Member, Sum};
pub use fixpoint::{fold, fold_ref, try_unfold, unfold, unfold_bounded, Fixpoint};
pub use program::{
    build, build_bounded, eval, eval_ref, sequence, try_build, Program, ProgramNode,
};

use crate::error::DepthExceeded;

/// Default bound on the depth of structures generated by `unfold`/`build`.
pub const DEFAULT_DEPTH_LIMIT: usize = 1_000_000;

/// A one-level shape functor.
///
/// Implementors are uninhabited marker types; the actual data lives in
/// [`Shape::Of`]. Both mapping functions must visit slots in the same order
/// and must leave the non-slot data untouched, which gives the usual functor
/// laws:
///
/// - `map_slots(node, |x| x) == node`
/// - `map_slots(map_slots(node, f), g) == map_slots(node, |x| g(f(x)))`
pub trait Shape {
    /// The shape with its slots holding values of type `T`.
    type Of<T>;

    fn map_slots<A, B>(node: Self::Of<A>, f: impl FnMut(A) -> B) -> Self::Of<B>;

    /// Like [`Shape::map_slots`] but borrowing; non-slot data is cloned.
    fn map_slots_ref<'a, A: 'a, B>(node: &'a Self::Of<A>, f: impl FnMut(&'a A) -> B)
        -> Self::Of<B>;
}

/// Number of recursive slots in a node.
pub fn slot_count<S: Shape, A>(node: &S::Of<A>) -> usize {
    let mut n = 0;
    S::map_slots_ref(node, |_| n += 1);
    n
}

/// Separates a node into its slot-free skeleton and its slot contents.
pub(crate) fn split<S: Shape, A>(node: S::Of<A>) -> (S::Of<()>, Vec<A>) {
    let mut slots = Vec::new();
    let skeleton = S::map_slots(node, |a| slots.push(a));
    (skeleton, slots)
}

pub(crate) fn split_ref<S: Shape, A>(node: &S::Of<A>) -> (S::Of<()>, Vec<&A>) {
    let mut slots = Vec::new();
    let skeleton = S::map_slots_ref(node, |a| slots.push(a));
    (skeleton, slots)
}

/// Inverse of [`split`]: places `items` back into the skeleton's slots.
pub(crate) fn refill<S: Shape, B>(skeleton: S::Of<()>, items: Vec<B>) -> S::Of<B> {
    let mut items = items.into_iter();
    let node = S::map_slots(skeleton, |()| {
        items
            .next()
            .expect("shape produced more slots on refill than on split")
    });
    debug_assert!(
        items.next().is_none(),
        "shape lost slots between split and refill"
    );
    node
}

/// Pairs two algebras over the same shape into one algebra over pairs.
///
/// Folding with the paired algebra yields exactly the pair of the two
/// individual folds (the banana-split law).
pub fn pair_algebra<S, B, C>(
    mut alg_b: impl FnMut(S::Of<B>) -> B,
    mut alg_c: impl FnMut(S::Of<C>) -> C,
) -> impl FnMut(S::Of<(B, C)>) -> (B, C)
where
    S: Shape,
{
    move |node| {
        let mut seconds = Vec::new();
        let node_b = S::map_slots(node, |(b, c)| {
            seconds.push(c);
            b
        });
        let mut seconds = seconds.into_iter();
        let node_c = S::map_slots_ref(&node_b, |_| {
            seconds
                .next()
                .expect("map_slots_ref visited more slots than map_slots")
        });
        (alg_b(node_b), alg_c(node_c))
    }
}

/// Pairs two generators; the argument is cloned for the first one.
pub fn pair_generator<A: Clone, B, C>(
    mut gen_b: impl FnMut(A) -> B,
    mut gen_c: impl FnMut(A) -> C,
) -> impl FnMut(A) -> (B, C) {
    move |a| (gen_b(a.clone()), gen_c(a))
}

pub(crate) enum Expanded<S: Shape, C, R> {
    Leaf(R),
    Node(S::Of<()>, Vec<C>),
}

struct Frame<S: Shape, C, R> {
    skeleton: S::Of<()>,
    pending: std::vec::IntoIter<C>,
    done: Vec<R>,
}

/// The single traversal engine behind every fold and unfold.
///
/// `expand` turns a cursor (a subtree, or a seed) into either a finished
/// value or a skeleton plus child cursors; `alg` combines a skeleton whose
/// slots are finished values. Children are processed left to right and
/// `alg` runs after all of a node's children, innermost first.
pub(crate) fn traverse<S, C, R, E>(
    root: C,
    limit: Option<usize>,
    mut expand: impl FnMut(C) -> Result<Expanded<S, C, R>, E>,
    mut alg: impl FnMut(S::Of<R>) -> R,
) -> Result<R, E>
where
    S: Shape,
    E: From<DepthExceeded>,
{
    let mut stack: Vec<Frame<S, C, R>> = Vec::new();
    let mut current = root;
    loop {
        let mut value = match expand(current)? {
            Expanded::Leaf(r) => r,
            Expanded::Node(skeleton, children) => {
                if let Some(limit) = limit {
                    if stack.len() >= limit {
                        return Err(DepthExceeded { limit }.into());
                    }
                }
                let mut pending = children.into_iter();
                match pending.next() {
                    Some(first) => {
                        stack.push(Frame {
                            skeleton,
                            pending,
                            done: Vec::new(),
                        });
                        current = first;
                        continue;
                    }
                    None => alg(refill::<S, R>(skeleton, Vec::new())),
                }
            }
        };

        loop {
            let Some(frame) = stack.last_mut() else {
                return Ok(value);
            };
            frame.done.push(value);
            if let Some(next) = frame.pending.next() {
                current = next;
                break;
            }
            let frame = stack.pop().expect("frame checked above");
            value = alg(refill::<S, R>(frame.skeleton, frame.done));
        }
    }
}
