use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rings::{prime_power, Elem, FiniteField, RingDesc, VarKind};

use super::class::{classify, RingClass};
use super::KError;

/// Largest unit group of `ℤ/pᵏ` handled by table lookup.
const DLOG_LIMIT: u64 = 1 << 20;

/// A generator of the unit group of a connected component, with its order (`0` = infinite).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGen {
    pub rep: Elem,
    pub order: BigInt,
    pub semantics: String,
}

fn prime_field_of(ground: &RingDesc) -> Option<FiniteField> {
    match ground {
        RingDesc::FiniteField(f) => Some((**f).clone()),
        RingDesc::IntegersMod(p) if prime_power(*p).is_some_and(|(_, k)| k == 1) => Some(FiniteField::new(*p)),
        _ => None,
    }
}

fn field_elem(ground: &RingDesc, v: u64) -> Elem {
    match ground {
        RingDesc::FiniteField(_) => Elem::Ff(v),
        _ => Elem::Mod(v),
    }
}

fn field_value(x: &Elem) -> u64 {
    match x {
        Elem::Ff(v) | Elem::Mod(v) => *v,
        _ => unreachable!(),
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Generators of `(ℤ/pᵏ)^×`, `k ≥ 2`, each with its order.
fn local_generators(p: u64, k: u32) -> Vec<(u64, u64)> {
    let m = p.pow(k);
    if p == 2 {
        return if k == 2 { vec![(m - 1, 2)] } else { vec![(m - 1, 2), (5, 1 << (k - 2))] };
    }
    let f = FiniteField::new(p);
    let mut g = f.generator();
    // a primitive root mod p that stays primitive mod p²
    let pm1 = {
        let mut acc = 1;
        for _ in 0..p - 1 {
            acc = mul_mod(acc, g, p * p);
        }
        acc
    };
    if pm1 == 1 {
        g += p;
    }
    vec![(g, (p - 1) * p.pow(k - 1))]
}

fn dlog_table(g: u64, order: u64, m: u64, x: u64) -> Result<u64, KError> {
    if order > DLOG_LIMIT {
        return Err(KError::Unsupported(format!("unit group of ℤ/{m} is too large for table discrete logs")));
    }
    let mut acc = 1 % m;
    for e in 0..order {
        if acc == x {
            return Ok(e);
        }
        acc = mul_mod(acc, g, m);
    }
    Err(KError::Unsupported(format!("{x} is not a power of {g} mod {m}")))
}

/// Coordinates of a unit of `ℤ/pᵏ` with respect to [`local_generators`].
fn local_coords(p: u64, k: u32, x: u64) -> Result<Vec<BigInt>, KError> {
    let m = p.pow(k);
    let gens = local_generators(p, k);
    if p == 2 {
        let sign = u64::from(x % 4 == 3);
        if k == 2 {
            return Ok(vec![BigInt::from(sign)]);
        }
        let y = if sign == 1 { mul_mod(x, m - 1, m) } else { x };
        return Ok(vec![BigInt::from(sign), BigInt::from(dlog_table(5, gens[1].1, m, y)?)]);
    }
    Ok(vec![BigInt::from(dlog_table(gens[0].0, gens[0].1, m, x)?)])
}

fn ground_generators(ring: &RingDesc) -> Result<Vec<UnitGen>, KError> {
    if let Some(f) = prime_field_of(ring) {
        return Ok(vec![UnitGen {
            rep: field_elem(ring, f.generator()),
            order: BigInt::from(f.order() - 1),
            semantics: "unit class of the field generator".into(),
        }]);
    }
    match ring {
        RingDesc::Integers => Ok(vec![UnitGen {
            rep: ring.from_int(-1),
            order: BigInt::from(2),
            semantics: "unit class of -1".into(),
        }]),
        RingDesc::IntegersMod(1) => Ok(Vec::new()),
        RingDesc::IntegersMod(m) => {
            let (p, k) = prime_power(*m).expect("connected component");
            Ok(local_generators(p, k)
                .into_iter()
                .map(|(g, o)| UnitGen {
                    rep: Elem::Mod(g),
                    order: BigInt::from(o),
                    semantics: format!("unit class of {g}"),
                })
                .collect())
        }
        _ => unreachable!(),
    }
}

fn ground_coords(ring: &RingDesc, x: &Elem) -> Result<Vec<BigInt>, KError> {
    if let Some(f) = prime_field_of(ring) {
        let d = f.dlog(field_value(x)).ok_or(KError::NotAUnit)?;
        return Ok(vec![BigInt::from(d)]);
    }
    match (ring, x) {
        (RingDesc::Integers, Elem::Int(v)) if v.is_one() => Ok(vec![BigInt::zero()]),
        (RingDesc::Integers, Elem::Int(v)) if (-v).is_one() => Ok(vec![BigInt::one()]),
        (RingDesc::IntegersMod(1), _) => Ok(Vec::new()),
        (RingDesc::IntegersMod(m), Elem::Mod(v)) => {
            if !ring.is_unit(x)? {
                return Err(KError::NotAUnit);
            }
            let (p, k) = prime_power(*m).expect("connected component");
            local_coords(p, k, *v)
        }
        _ => Err(KError::NotAUnit),
    }
}

/// Generators of K₁ of a connected supported ring: base units, then `t` for Laurent rings.
pub fn k1_generators(ring: &RingDesc) -> Result<Vec<UnitGen>, KError> {
    match classify(ring) {
        RingClass::Zero => Ok(Vec::new()),
        RingClass::Field { .. } | RingClass::Integers | RingClass::LocalZModPk { .. } => ground_generators(ring),
        RingClass::EuclideanDomain { .. } | RingClass::LaurentOverField { .. } | RingClass::IntegralExtension { .. } => {
            let e = ring.extension().expect("extension");
            let mut gens: Vec<UnitGen> = ground_generators(&e.base)?
                .into_iter()
                .map(|g| UnitGen {
                    rep: ring.monomial(g.rep, 0).expect("constant"),
                    ..g
                })
                .collect();
            if e.kind == VarKind::Laurent {
                gens.push(UnitGen {
                    rep: ring.var_power(1)?,
                    order: BigInt::zero(),
                    semantics: format!("unit class of {}", e.var),
                });
            }
            Ok(gens)
        }
        RingClass::LocalExtension { p, k, .. } => Err(KError::Unsupported(format!(
            "K₁ of {ring} is not finitely generated (it contains 1 + {p}·t·ℤ/{}[t])",
            p.pow(k)
        ))),
        c => Err(KError::Unsupported(format!("K₁ of {ring} ({c})"))),
    }
}

/// Coordinates of a unit of a connected supported ring in [`k1_generators`].
pub fn k1_coords(ring: &RingDesc, x: &Elem) -> Result<Vec<BigInt>, KError> {
    match ring.extension() {
        None => ground_coords(ring, x),
        Some(e) => {
            k1_generators(ring)?;
            let (c, n) = ring.classify_unit(x)?.ok_or(KError::NotAUnit)?;
            let mut v = ground_coords(&e.base, &c)?;
            if e.kind == VarKind::Laurent {
                v.push(BigInt::from(n));
            }
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    #[test]
    fn local_unit_groups() {
        for m in [4u64, 8, 16, 9, 27, 25, 49] {
            let r = RingDesc::IntegersMod(m);
            let gens = k1_generators(&r).unwrap();
            let total: BigInt = gens.iter().map(|g| g.order.clone()).product();
            let units = (1..m).filter(|x| x.gcd(&m) == 1).count();
            assert_eq!(total, BigInt::from(units), "ℤ/{m}");
            // every unit has coordinates reproducing it
            for x in (1..m).filter(|x| x.gcd(&m) == 1) {
                let c = k1_coords(&r, &Elem::Mod(x)).unwrap();
                let mut acc = r.one();
                for (g, e) in gens.iter().zip(&c) {
                    let e: u64 = e.try_into().unwrap();
                    acc = r.mul(&acc, &r.pow(&g.rep, e));
                }
                assert_eq!(acc, Elem::Mod(x));
            }
        }
    }

    #[test]
    fn laurent_unit_coordinates() {
        let r = RingDesc::finite_field(5).unwrap().laurent("t");
        let x = r.monomial(Elem::Ff(3), -4).unwrap();
        let c = k1_coords(&r, &x).unwrap();
        assert_eq!(c[1], BigInt::from(-4));
        assert!(k1_coords(&r, &r.add(&x, &r.one())).is_err());
    }
}
