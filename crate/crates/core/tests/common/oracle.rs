//! Independent reference models for the activation runtime.

use layerctx::{ctx, register_layer, Frame, LayerId};
use rand::Rng;

/// One raw frame as a test generates it: activate flag and layers, possibly
/// with repeats.
pub type RawFrame = (bool, Vec<LayerId>);

/// Effective list by direct replay: a layer is active iff its latest mention
/// anywhere in the stack is inside an activating frame, and active layers are
/// ordered by the position of that latest mention.
pub fn replay(frames: &[RawFrame]) -> Vec<LayerId> {
    let mut latest: Vec<(LayerId, (usize, usize), bool)> = Vec::new();
    for (i, (activate, layers)) in frames.iter().enumerate() {
        for (j, layer) in layers.iter().enumerate() {
            latest.retain(|(l, _, _)| l != layer);
            latest.push((*layer, (i, j), *activate));
        }
    }
    let mut active: Vec<_> = latest.into_iter().filter(|(_, _, a)| *a).collect();
    active.sort_by_key(|(_, at, _)| *at);
    active.into_iter().map(|(l, _, _)| l).collect()
}

pub fn to_frame((activate, layers): &RawFrame) -> Frame {
    if *activate {
        Frame::activate(layers.iter().copied()).expect("nonempty")
    } else {
        Frame::deactivate(layers.iter().copied()).expect("nonempty")
    }
}

pub fn oracle_layers(n: usize) -> Vec<LayerId> {
    (0..n)
        .map(|i| register_layer(&format!("oracle.layers.L{i}")).expect("valid name"))
        .collect()
}

pub fn random_layers(rng: &mut impl Rng, pool: &[LayerId]) -> Vec<LayerId> {
    let len = rng.gen_range(1..=pool.len());
    (0..len).map(|_| pool[rng.gen_range(0..pool.len())]).collect()
}

pub fn random_frames(rng: &mut impl Rng, pool: &[LayerId], max_frames: usize) -> Vec<RawFrame> {
    let n = rng.gen_range(0..=max_frames);
    (0..n).map(|_| (rng.gen_bool(0.5), random_layers(rng, pool))).collect()
}

/// Drives the thread-local API through a random balanced sequence of
/// with/without/end calls, checking after each `end` that the activation is
/// exactly what it was before the matching push. Leaves the stack as found.
pub fn balanced_sequence(rng: &mut impl Rng, pool: &[LayerId], steps: usize) -> Result<(), String> {
    let base_depth = ctx::depth();
    let mut saved = Vec::new();
    for step in 0..steps {
        let push = saved.is_empty() || rng.gen_bool(0.6);
        if push {
            saved.push(ctx::current_activation());
            let layers = random_layers(rng, pool);
            let r = if rng.gen_bool(0.5) {
                ctx::with_active_layers(layers)
            } else {
                ctx::without_layers(layers)
            };
            r.map_err(|e| format!("step {step}: {e}"))?;
        } else {
            unwind_one(&mut saved, step)?;
        }
    }
    while !saved.is_empty() {
        unwind_one(&mut saved, steps)?;
    }
    if ctx::depth() != base_depth {
        return Err(format!("depth {} after unwinding, expected {base_depth}", ctx::depth()));
    }
    Ok(())
}

fn unwind_one(saved: &mut Vec<Vec<LayerId>>, step: usize) -> Result<(), String> {
    let expected = saved.pop().expect("nonempty");
    ctx::end().map_err(|e| format!("step {step}: {e}"))?;
    let actual = ctx::current_activation();
    if actual != expected {
        return Err(format!("step {step}: restored {actual:?}, expected {expected:?}"));
    }
    Ok(())
}
