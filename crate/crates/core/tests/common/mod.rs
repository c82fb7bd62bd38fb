//! Helpers shared by the oracle and acceptance tests.

use kwb_core::abgroup::GroupHom;
use kwb_core::delooper::{ExprMap, KSource};
use kwb_core::oracle;
use kwb_core::rings::Structural;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn leaves(v: &Value, path: Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| {
            let mut p = path.clone();
            p.push(k.clone());
            leaves(x, p, out)
        }),
        Value::Array(a) => {
            if a.is_empty() {
                out.push(path.clone());
            }
            a.iter().enumerate().for_each(|(i, x)| {
                let mut p = path.clone();
                p.push(i.to_string());
                leaves(x, p, out)
            })
        }
        _ => out.push(path),
    }
}

fn at<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
    path.iter().fold(v, |v, k| match v {
        Value::Object(m) => m.get_mut(k).unwrap(),
        Value::Array(a) => &mut a[k.parse::<usize>().unwrap()],
        _ => unreachable!(),
    })
}

pub fn mutate(v: &mut Value, rng: &mut ChaCha8Rng) {
    let mut ls = Vec::new();
    leaves(v, Vec::new(), &mut ls);
    let path = ls.choose(rng).unwrap().clone();
    let leaf = at(v, &path);
    *leaf = match leaf.clone() {
        Value::String(s) => match s.parse::<i64>() {
            Ok(n) => {
                let choices = [n + 1, n - 1, -n, 0, 2 * n + 3, 1_000_000_007];
                Value::String(choices.choose(rng).unwrap().to_string())
            }
            Err(_) => {
                let choices = ["laurent", "polynomial", "i_plus", "ev0_minus", "rho", "", "id", "Q", "F3[t]", "x"];
                Value::String(choices.choose(rng).unwrap().to_string())
            }
        },
        Value::Array(_) => Value::Array(vec![Value::String("1".into())]),
        _ => Value::Null,
    };
}

/// Independent re-check of a loaded source: every served structural map is well-defined
/// and satisfies the composite identities.
pub fn identities_hold(s: &oracle::OracleSource) -> bool {
    let (lo, hi) = s.window();
    for base in s.base_objects() {
        for d in lo..=hi {
            let m = |k| s.map(&ExprMap::last(base, k), d).ok();
            let all: Vec<Option<GroupHom>> = Structural::ALL.iter().map(|k| m(*k)).collect();
            if all.iter().flatten().any(|f| f.validate().is_err()) {
                return false;
            }
            let [i0, ip, im, jp, jm, ep, em] = <[Option<GroupHom>; 7]>::try_from(all).unwrap();
            let id = |f: &GroupHom| GroupHom::identity(f.domain());
            let eq = |a: Result<GroupHom, _>, b: &GroupHom| a.map(|c| c.equals(b)).unwrap_or(false);
            if let (Some(e), Some(i)) = (&ep, &ip) {
                if !eq(e.compose(i), &id(i)) {
                    return false;
                }
            }
            if let (Some(e), Some(i)) = (&em, &im) {
                if !eq(e.compose(i), &id(i)) {
                    return false;
                }
            }
            if let (Some(j), Some(i), Some(z)) = (&jp, &ip, &i0) {
                if !eq(j.compose(i), z) {
                    return false;
                }
            }
            if let (Some(j), Some(i), Some(z)) = (&jm, &im, &i0) {
                if !eq(j.compose(i), z) {
                    return false;
                }
            }
        }
    }
    true
}
