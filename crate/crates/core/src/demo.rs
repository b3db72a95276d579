//! The resource storage example: a `request` method with a caching and a
//! logging partial, driven through the canonical four requests.

use std::collections::HashMap;

use crate::ctx;
use crate::layer::{register_layer, LayerId};
use crate::table::{DispatchTable, MethodKey, TableBuilder};
use crate::Proceed;

pub const CACHING: &str = "demo.layers.caching";
pub const LOGGING: &str = "demo.layers.logging";

/// Receiver state. `console` collects what the bodies print.
#[derive(Debug, Default)]
pub struct ResourceStorage {
    cache: HashMap<String, String>,
    pub console: Vec<String>,
}

pub fn request_key() -> MethodKey {
    MethodKey::new("ResourceStorage", "request")
}

pub struct Fixture {
    pub table: DispatchTable,
    pub caching: LayerId,
    pub logging: LayerId,
}

pub fn fixture() -> Fixture {
    let caching = register_layer(CACHING).expect("valid layer name");
    let logging = register_layer(LOGGING).expect("valid layer name");
    let mut t = TableBuilder::new();
    t.register_base(request_key(), |rs: &mut ResourceStorage, req: String| {
        rs.console.push("Search".into());
        format!("item:{req}")
    })
    .expect("fresh table");
    t.register_partial(
        request_key(),
        caching,
        |rs: &mut ResourceStorage, req: String, proceed: Proceed<'_, ResourceStorage, String, String>| {
            rs.console.push("Cache...".into());
            if let Some(hit) = rs.cache.get(&req) {
                return hit.clone();
            }
            let result = proceed.call(rs, req.clone());
            rs.cache.insert(req, result.clone());
            result
        },
    )
    .expect("fresh table");
    t.register_partial(
        request_key(),
        logging,
        |rs: &mut ResourceStorage, req: String, proceed: Proceed<'_, ResourceStorage, String, String>| {
            rs.console.push("Request!".into());
            proceed.call(rs, req)
        },
    )
    .expect("fresh table");
    Fixture {
        table: t.finalize().expect("every partial has a base"),
        caching,
        logging,
    }
}

/// Runs the four requests and returns the console lines.
pub fn run() -> Vec<String> {
    let fx = fixture();
    let request = fx
        .table
        .method::<ResourceStorage, String, String>(&request_key())
        .expect("registered above");
    let mut rs = ResourceStorage::default();

    request.call(&mut rs, "Item1".into());
    ctx::with_active_layers([fx.logging]).expect("nonempty");
    request.call(&mut rs, "Item2".into());
    ctx::end().expect("balanced");
    request.call(&mut rs, "Item3".into());
    ctx::with_active_layers([fx.caching, fx.logging]).expect("nonempty");
    request.call(&mut rs, "Item4".into());
    ctx::end().expect("balanced");

    rs.console
}
