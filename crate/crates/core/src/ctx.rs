//! Layer activation with dynamic extent.
//!
//! Every thread owns one [`ContextStack`]. `with_active_layers` and
//! `without_layers` push a frame, [`end`] pops the most recent one. The set of
//! layers that affect dispatch is obtained by folding the frames bottom to top
//! (see [`effective_layers`]).
//!
//! ```
//! use layerctx::{ctx, register_layer};
//!
//! let logging = register_layer("demo.logging").unwrap();
//! ctx::with_active_layers([logging]).unwrap();
//! assert_eq!(ctx::current_activation(), vec![logging]);
//! ctx::end().unwrap();
//! assert!(ctx::current_activation().is_empty());
//! ```

use std::cell::RefCell;

use thiserror::Error;

use crate::layer::LayerId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivationError {
    #[error("activation frame needs at least one layer")]
    EmptyActivation,
    #[error("end() called with no active frame")]
    UnbalancedEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Activate,
    Deactivate,
}

/// One activation or deactivation, as pushed by a single `with`/`without`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    kind: FrameKind,
    layers: Vec<LayerId>,
}

impl Frame {
    /// Duplicates collapse onto their last occurrence.
    pub fn new(kind: FrameKind, layers: impl IntoIterator<Item = LayerId>) -> Result<Self, ActivationError> {
        let mut out: Vec<LayerId> = Vec::new();
        for layer in layers {
            out.retain(|l| *l != layer);
            out.push(layer);
        }
        if out.is_empty() {
            return Err(ActivationError::EmptyActivation);
        }
        Ok(Frame { kind, layers: out })
    }

    pub fn activate(layers: impl IntoIterator<Item = LayerId>) -> Result<Self, ActivationError> {
        Frame::new(FrameKind::Activate, layers)
    }

    pub fn deactivate(layers: impl IntoIterator<Item = LayerId>) -> Result<Self, ActivationError> {
        Frame::new(FrameKind::Deactivate, layers)
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn layers(&self) -> &[LayerId] {
        &self.layers
    }

    /// Applies this frame on top of an effective list.
    ///
    /// Activation moves already-active layers to the most recent position.
    /// Deactivating a layer that is not active does nothing.
    pub fn apply(&self, effective: &mut Vec<LayerId>) {
        match self.kind {
            FrameKind::Activate => {
                for layer in &self.layers {
                    effective.retain(|l| l != layer);
                    effective.push(*layer);
                }
            }
            FrameKind::Deactivate => effective.retain(|l| !self.layers.contains(l)),
        }
    }
}

/// Effective activation list for a sequence of frames, least recent first.
pub fn effective_layers(frames: &[Frame]) -> Vec<LayerId> {
    let mut effective = Vec::new();
    for frame in frames {
        frame.apply(&mut effective);
    }
    effective
}

/// LIFO of frames with the effective list cached at every depth.
#[derive(Debug, Clone, Default)]
pub struct ContextStack {
    frames: Vec<Frame>,
    // effective[i] is the fold of frames[..=i]
    effective: Vec<Vec<LayerId>>,
}

impl ContextStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, frame: Frame) {
        let mut next = self.effective().to_vec();
        frame.apply(&mut next);
        self.frames.push(frame);
        self.effective.push(next);
    }

    pub fn pop(&mut self) -> Result<Frame, ActivationError> {
        let frame = self.frames.pop().ok_or(ActivationError::UnbalancedEnd)?;
        self.effective.pop();
        Ok(frame)
    }

    pub fn truncate(&mut self, depth: usize) {
        self.frames.truncate(depth);
        self.effective.truncate(depth);
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn effective(&self) -> &[LayerId] {
        self.effective.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl FromIterator<Frame> for ContextStack {
    fn from_iter<I: IntoIterator<Item = Frame>>(iter: I) -> Self {
        let mut stack = ContextStack::new();
        for frame in iter {
            stack.push(frame);
        }
        stack
    }
}

thread_local! {
    static STACK: RefCell<ContextStack> = RefCell::new(ContextStack::new());
}

/// Runs `f` against the calling thread's stack.
///
/// The borrow ends before `f`'s result is returned, so callers must not
/// invoke layered code from inside `f`.
pub fn with_current_stack<T>(f: impl FnOnce(&ContextStack) -> T) -> T {
    STACK.with(|s| f(&s.borrow()))
}

fn push(frame: Frame) {
    STACK.with(|s| s.borrow_mut().push(frame));
}

pub fn with_active_layers(layers: impl IntoIterator<Item = LayerId>) -> Result<(), ActivationError> {
    push(Frame::activate(layers)?);
    Ok(())
}

pub fn without_layers(layers: impl IntoIterator<Item = LayerId>) -> Result<(), ActivationError> {
    push(Frame::deactivate(layers)?);
    Ok(())
}

/// Pops the frame pushed by the matching `with_active_layers`/`without_layers`.
pub fn end() -> Result<(), ActivationError> {
    STACK.with(|s| s.borrow_mut().pop()).map(drop)
}

/// Copy of the calling thread's effective layer list.
pub fn current_activation() -> Vec<LayerId> {
    with_current_stack(|s| s.effective().to_vec())
}

pub fn depth() -> usize {
    with_current_stack(ContextStack::depth)
}

struct Restore {
    depth: usize,
}

impl Drop for Restore {
    fn drop(&mut self) {
        // Runs during unwinding too; try_with avoids touching a destroyed TLS slot.
        let _ = STACK.try_with(|s| s.borrow_mut().truncate(self.depth));
    }
}

fn run_in_frame<T>(frame: Frame, body: impl FnOnce() -> T) -> T {
    let restore = Restore { depth: depth() };
    push(frame);
    let out = body();
    drop(restore);
    out
}

/// `with_active_layers(layers); body(); end()` with the pop guaranteed,
/// including when `body` panics.
pub fn scoped<T>(layers: impl IntoIterator<Item = LayerId>, body: impl FnOnce() -> T) -> Result<T, ActivationError> {
    Ok(run_in_frame(Frame::activate(layers)?, body))
}

/// Like [`scoped`], for bodies that fail. The body's error is returned after
/// the frame has been popped.
pub fn try_scoped<T, E>(layers: impl IntoIterator<Item = LayerId>, body: impl FnOnce() -> Result<T, E>) -> Result<T, E>
where
    E: From<ActivationError>,
{
    run_in_frame(Frame::activate(layers)?, body)
}

/// Deactivating counterpart of [`scoped`].
pub fn scoped_without<T>(
    layers: impl IntoIterator<Item = LayerId>,
    body: impl FnOnce() -> T,
) -> Result<T, ActivationError> {
    Ok(run_in_frame(Frame::deactivate(layers)?, body))
}
