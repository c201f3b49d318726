//! Finitely supported maps with canonical (zero-free) support.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::linalg::Domain;

/// Adds `c` at `key`, dropping the entry if it cancels.
pub(crate) fn accumulate<K: Ord, V: Domain>(map: &mut BTreeMap<K, V>, key: K, c: V) {
    if c.is_zero_elem() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let sum = e.get().add_elem(&c);
            if sum.is_zero_elem() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}
