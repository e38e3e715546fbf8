#![allow(dead_code)]

pub mod riccati_oracle;

use std::sync::{Mutex, MutexGuard};

static SERIAL: Mutex<()> = Mutex::new(());

/// Heavy Monte Carlo tests take this so their timings are not shared with
/// other tests of the same binary.
pub fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}
