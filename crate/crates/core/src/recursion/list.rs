//! The list shape, used as a small, well-understood fixture for the
//! recursion machinery.

use std::marker::PhantomData;

use super::{Fixpoint, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ListF<A, K> {
    NilF,
    ConsF(A, K),
}

pub struct ListShape<A>(PhantomData<fn() -> A>);

impl<A: Clone> Shape for ListShape<A> {
    type Of<K> = ListF<A, K>;

    fn map_slots<K, L>(node: ListF<A, K>, mut f: impl FnMut(K) -> L) -> ListF<A, L> {
        match node {
            ListF::NilF => ListF::NilF,
            ListF::ConsF(a, k) => ListF::ConsF(a, f(k)),
        }
    }

    fn map_slots_ref<'a, K: 'a, L>(
        node: &'a ListF<A, K>,
        mut f: impl FnMut(&'a K) -> L,
    ) -> ListF<A, L> {
        match node {
            ListF::NilF => ListF::NilF,
            ListF::ConsF(a, k) => ListF::ConsF(a.clone(), f(k)),
        }
    }
}

pub type List<A> = Fixpoint<ListShape<A>>;

/// Encodes a slice, first element outermost.
pub fn from_slice<A: Clone>(items: &[A]) -> List<A> {
    let mut list = Fixpoint::wrap(ListF::NilF);
    for item in items.iter().rev() {
        list = Fixpoint::wrap(ListF::ConsF(item.clone(), list));
    }
    list
}

pub fn to_vec<A: Clone>(list: &List<A>) -> Vec<A> {
    let mut out = Vec::new();
    let mut cursor = list;
    while let ListF::ConsF(a, rest) = cursor.node() {
        out.push(a.clone());
        cursor = rest;
    }
    out
}
