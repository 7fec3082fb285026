use std::marker::PhantomData;

use super::Shape;

/// A value of one of two shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coproduct<L, R> {
    Left(L),
    Right(R),
}

/// The coproduct of two shapes. Three or more summands nest to the right:
/// `Sum<A, Sum<B, C>>`.
pub struct Sum<F, G>(PhantomData<fn() -> (F, G)>);

impl<F: Shape, G: Shape> Shape for Sum<F, G> {
    type Of<T> = Coproduct<F::Of<T>, G::Of<T>>;

    fn map_slots<A, B>(node: Self::Of<A>, f: impl FnMut(A) -> B) -> Self::Of<B> {
        match node {
            Coproduct::Left(l) => Coproduct::Left(F::map_slots(l, f)),
            Coproduct::Right(r) => Coproduct::Right(G::map_slots(r, f)),
        }
    }

    fn map_slots_ref<'a, A: 'a, B>(
        node: &'a Self::Of<A>,
        f: impl FnMut(&'a A) -> B,
    ) -> Self::Of<B> {
        match node {
            Coproduct::Left(l) => Coproduct::Left(F::map_slots_ref(l, f)),
            Coproduct::Right(r) => Coproduct::Right(G::map_slots_ref(r, f)),
        }
    }
}

/// Membership index: the shape itself.
pub enum Here {}

/// Membership index: found in the left summand at `I`.
pub struct InLeft<I>(PhantomData<I>);

/// Membership index: found in the right summand at `I`.
pub struct InRight<I>(PhantomData<I>);

/// `Sub` is one of the summands of `Self`.
///
/// The index parameter is inferred by the compiler and only exists to keep
/// the instances apart; it is ambiguous (a type error) if `Sub` occurs more
/// than once in the coproduct.
pub trait Member<Sub: Shape, Index>: Shape {
    fn inject<T>(node: Sub::Of<T>) -> Self::Of<T>;

    fn project<T>(node: Self::Of<T>) -> Option<Sub::Of<T>>;

    fn project_ref<T>(node: &Self::Of<T>) -> Option<&Sub::Of<T>>;
}

impl<S: Shape> Member<S, Here> for S {
    fn inject<T>(node: S::Of<T>) -> S::Of<T> {
        node
    }

    fn project<T>(node: S::Of<T>) -> Option<S::Of<T>> {
        Some(node)
    }

    fn project_ref<T>(node: &S::Of<T>) -> Option<&S::Of<T>> {
        Some(node)
    }
}

impl<F, G, Sub, I> Member<Sub, InLeft<I>> for Sum<F, G>
where
    F: Member<Sub, I>,
    G: Shape,
    Sub: Shape,
{
    fn inject<T>(node: Sub::Of<T>) -> Self::Of<T> {
        Coproduct::Left(F::inject(node))
    }

    fn project<T>(node: Self::Of<T>) -> Option<Sub::Of<T>> {
        match node {
            Coproduct::Left(l) => F::project(l),
            Coproduct::Right(_) => None,
        }
    }

    fn project_ref<T>(node: &Self::Of<T>) -> Option<&Sub::Of<T>> {
        match node {
            Coproduct::Left(l) => F::project_ref(l),
            Coproduct::Right(_) => None,
        }
    }
}

impl<F, G, Sub, I> Member<Sub, InRight<I>> for Sum<F, G>
where
    F: Shape,
    G: Member<Sub, I>,
    Sub: Shape,
{
    fn inject<T>(node: Sub::Of<T>) -> Self::Of<T> {
        Coproduct::Right(G::inject(node))
    }

    fn project<T>(node: Self::Of<T>) -> Option<Sub::Of<T>> {
        match node {
            Coproduct::Left(_) => None,
            Coproduct::Right(r) => G::project(r),
        }
    }

    fn project_ref<T>(node: &Self::Of<T>) -> Option<&Sub::Of<T>> {
        match node {
            Coproduct::Left(_) => None,
            Coproduct::Right(r) => G::project_ref(r),
        }
    }
}
