//! Proceed-chain dispatch.
//!
//! A call to a layered method snapshots the caller's effective layer list
//! once, builds a [`DispatchChain`] from it and runs the head of the chain.
//! Each partial receives a [`Proceed`] handle for the remainder; the base
//! receives none. Activations made while the chain runs only affect nested
//! dispatches.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::ctx::{self, ContextStack};
use crate::layer::LayerId;
use crate::table::{BaseFn, Entry, PartialFn};

thread_local! {
    static LOOKUPS: Cell<u64> = const { Cell::new(0) };
}

pub(crate) fn note_lookup() {
    LOOKUPS.with(|c| c.set(c.get() + 1));
}

/// Number of dispatch-table consultations made by the calling thread.
///
/// Resolving a key and every call through a [`Method`] handle count as one
/// each. Plain method calls never touch the table, so they never move this.
pub fn table_lookups() -> u64 {
    LOOKUPS.with(Cell::get)
}

pub(crate) type ChainBuf<'t, R, A, O> = SmallVec<[(LayerId, &'t PartialFn<R, A, O>); 8]>;

/// Partials in execution order followed by the base.
pub struct DispatchChain<'t, R, A, O> {
    partials: ChainBuf<'t, R, A, O>,
    base: &'t BaseFn<R, A, O>,
}

impl<'t, R, A, O> DispatchChain<'t, R, A, O> {
    pub(crate) fn new(partials: ChainBuf<'t, R, A, O>, base: &'t BaseFn<R, A, O>) -> Self {
        DispatchChain { partials, base }
    }

    /// Number of bodies, base included.
    pub fn len(&self) -> usize {
        self.partials.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Layers whose partials are in the chain, in execution order.
    pub fn layers(&self) -> impl ExactSizeIterator<Item = LayerId> + '_ {
        self.partials.iter().map(|(l, _)| *l)
    }

    pub fn invoke(&self, receiver: &mut R, args: A) -> O {
        Proceed {
            rest: &self.partials,
            base: self.base,
        }
        .call(receiver, args)
    }
}

impl<R, A, O> fmt::Debug for DispatchChain<'_, R, A, O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.layers().map(|l| l.qualified_name()))
            .entry(&"<base>")
            .finish()
    }
}

/// Continuation handed to a partial: runs the next partial, or the base once
/// the partials are exhausted.
///
/// It may be called any number of times; each call re-runs the rest of the
/// chain from the same position.
pub struct Proceed<'c, R, A, O> {
    rest: &'c [(LayerId, &'c PartialFn<R, A, O>)],
    base: &'c BaseFn<R, A, O>,
}

impl<R, A, O> Clone for Proceed<'_, R, A, O> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<R, A, O> Copy for Proceed<'_, R, A, O> {}

impl<'c, R, A, O> Proceed<'c, R, A, O> {
    #[inline]
    pub fn call(&self, receiver: &mut R, args: A) -> O {
        match self.rest.split_first() {
            Some(((_, partial), rest)) => partial(receiver, args, Proceed { rest, base: self.base }),
            None => (self.base)(receiver, args),
        }
    }

    /// Bodies still ahead of this handle, base included.
    pub fn remaining(&self) -> usize {
        self.rest.len() + 1
    }
}

/// Resolved handle to a layered method.
pub struct Method<R, A, O> {
    entry: Arc<Entry<R, A, O>>,
}

impl<R, A, O> Clone for Method<R, A, O> {
    fn clone(&self) -> Self {
        Method {
            entry: Arc::clone(&self.entry),
        }
    }
}

impl<R: 'static, A: 'static, O: 'static> Method<R, A, O> {
    pub(crate) fn new(entry: Arc<Entry<R, A, O>>) -> Self {
        Method { entry }
    }

    /// Dispatches under the calling thread's activation.
    pub fn call(&self, receiver: &mut R, args: A) -> O {
        note_lookup();
        let mut partials = ChainBuf::new();
        let base = ctx::with_current_stack(|s| self.entry.fill_chain(s.effective(), &mut partials));
        Proceed { rest: &partials, base }.call(receiver, args)
    }

    /// Dispatches under an explicit stack instead of the thread's own.
    pub fn call_in(&self, stack: &ContextStack, receiver: &mut R, args: A) -> O {
        note_lookup();
        let mut partials = ChainBuf::new();
        let base = self.entry.fill_chain(stack.effective(), &mut partials);
        Proceed { rest: &partials, base }.call(receiver, args)
    }

    pub fn chain(&self, effective: &[LayerId]) -> DispatchChain<'_, R, A, O> {
        self.entry.chain(effective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctx::Frame;
    use crate::layer::register_layer;
    use crate::table::{MethodKey, TableBuilder};

    type Trace = Vec<String>;

    fn key() -> MethodKey {
        MethodKey::new("Person", "print")
    }

    /// Person.print with partials in A and B, plus a layer X that refines nothing.
    fn person() -> (crate::table::DispatchTable, LayerId, LayerId, LayerId) {
        let a = register_layer("dispatch.test.A").unwrap();
        let b = register_layer("dispatch.test.B").unwrap();
        let x = register_layer("dispatch.test.X").unwrap();
        let mut t = TableBuilder::new();
        t.register_base(key(), |trace: &mut Trace, s: String| {
            trace.push("base".into());
            s + "Base"
        })
        .unwrap();
        for (layer, tag) in [(a, "A"), (b, "B")] {
            t.register_partial(
                key(),
                layer,
                move |trace: &mut Trace, s: String, p: Proceed<'_, Trace, String, String>| {
                    trace.push(tag.into());
                    let r = p.call(trace, s);
                    format!("{tag}{r}")
                },
            )
            .unwrap();
        }
        (t.finalize().unwrap(), a, b, x)
    }

    #[test]
    fn most_recent_activation_runs_first() {
        let (table, a, b, _) = person();
        let stack: ContextStack = [Frame::activate([a, b]).unwrap()].into_iter().collect();
        let mut trace = Trace::new();
        let out: String = table.dispatch(&key(), &stack, &mut trace, "x".to_string()).unwrap();
        assert_eq!(out, "BAxBase");
        assert_eq!(trace, ["B", "A", "base"]);
    }

    #[test]
    fn layers_without_partial_are_skipped() {
        let (table, a, b, x) = person();
        let chain = table.build_chain::<Trace, String, String>(&key(), &[x, a, b]).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain.layers().collect::<Vec<_>>(), vec![b, a]);
        let chain = table.build_chain::<Trace, String, String>(&key(), &[]).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(format!("{chain:?}"), "[\"<base>\"]");
    }

    #[test]
    fn proceed_zero_and_many_times() {
        let over = register_layer("dispatch.test.override").unwrap();
        let twice = register_layer("dispatch.test.twice").unwrap();
        let mut t = TableBuilder::new();
        t.register_base(key(), |n: &mut u32, ()| {
            *n += 1;
            *n
        })
        .unwrap();
        t.register_partial(key(), over, |_: &mut u32, (), _p: Proceed<'_, u32, (), u32>| 100)
            .unwrap();
        t.register_partial(key(), twice, |n: &mut u32, (), p: Proceed<'_, u32, (), u32>| {
            assert_eq!(p.remaining(), 1);
            p.call(n, ()) + p.call(n, ())
        })
        .unwrap();
        let table = t.finalize().unwrap();
        let m = table.method::<u32, (), u32>(&key()).unwrap();

        let mut n = 0;
        let stack: ContextStack = [Frame::activate([over]).unwrap()].into_iter().collect();
        assert_eq!(m.call_in(&stack, &mut n, ()), 100);
        assert_eq!(n, 0);

        let stack: ContextStack = [Frame::activate([twice]).unwrap()].into_iter().collect();
        assert_eq!(m.call_in(&stack, &mut n, ()), 1 + 2);
        assert_eq!(n, 2);
    }

    #[test]
    fn handle_uses_thread_stack_and_counts_lookups() {
        let (table, a, _, _) = person();
        let m = table.method::<Trace, String, String>(&key()).unwrap();
        let before = table_lookups();
        let mut trace = Trace::new();
        assert_eq!(m.call(&mut trace, "x".into()), "xBase");
        ctx::scoped([a], || assert_eq!(m.call(&mut trace, "x".into()), "AxBase")).unwrap();
        assert_eq!(table_lookups() - before, 2);
    }
}
