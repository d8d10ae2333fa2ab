//! Countable discrete groups with counting (Haar) measure.
//!
//! Elements are stored as short integer coordinate vectors so that a single
//! [`GroupElement`] type can serve every group kind selected at runtime:
//!
//! | kind         | coordinates         | product                                   |
//! |--------------|---------------------|-------------------------------------------|
//! | `Z`          | `[n]`               | addition                                  |
//! | `Zd`         | `[n_1, .., n_d]`    | coordinatewise addition                   |
//! | `heisenberg` | `[x, y, z]`         | `(x+x', y+y', z+z'+x*y')`                 |
//! | `cyclic`     | `[r]`, `0 <= r < m` | addition mod `m`                          |
//!
//! All arithmetic is checked; an overflowing product is an error, never a wrap.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("integer overflow in group arithmetic")]
    Overflow,
    #[error("element {element} does not belong to group {group}")]
    NotAnElement { element: GroupElement, group: String },
    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),
    #[error("element {element} is a torsion element of order {order}")]
    TorsionElement { element: GroupElement, order: u64 },
    #[error("compact set must be nonempty")]
    EmptySet,
}

/// A group element as an integer coordinate tuple.
///
/// Ordering is lexicographic on coordinates; it has no algebraic meaning and
/// only exists so that vectors and sets iterate deterministically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct GroupElement(SmallVec<[i64; 3]>);

impl GroupElement {
    pub fn new(coords: &[i64]) -> Self {
        GroupElement(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for GroupElement {
    fn from(v: Vec<i64>) -> Self {
        GroupElement(SmallVec::from_vec(v))
    }
}

impl From<GroupElement> for Vec<i64> {
    fn from(g: GroupElement) -> Self {
        g.0.into_vec()
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The group kinds supported by the laboratory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Group {
    /// The integers under addition.
    #[serde(rename = "Z")]
    Integers,
    /// The lattice ℤᵈ.
    #[serde(rename = "Zd")]
    Lattice { d: usize },
    /// The integer Heisenberg group of unipotent 3×3 matrices.
    #[serde(rename = "heisenberg")]
    Heisenberg,
    /// The finite cyclic group ℤ_m.
    #[serde(rename = "cyclic")]
    Cyclic { m: i64 },
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Integers => write!(f, "Z"),
            Group::Lattice { d } => write!(f, "Z^{d}"),
            Group::Heisenberg => write!(f, "H(Z)"),
            Group::Cyclic { m } => write!(f, "Z_{m}"),
        }
    }
}

impl Group {
    pub fn validate(&self) -> Result<(), GroupError> {
        match *self {
            Group::Lattice { d: 0 } => Err(GroupError::InvalidGroup("Zd requires d >= 1".into())),
            Group::Cyclic { m } if m < 1 => Err(GroupError::InvalidGroup("cyclic requires m >= 1".into())),
            _ => Ok(()),
        }
    }

    /// Number of integer coordinates of an element.
    pub fn rank(&self) -> usize {
        match *self {
            Group::Integers | Group::Cyclic { .. } => 1,
            Group::Lattice { d } => d,
            Group::Heisenberg => 3,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Cyclic { .. })
    }

    /// Every nonidentity element of ℤ, ℤᵈ and the integer Heisenberg group
    /// has infinite order.
    pub fn is_torsion_free(&self) -> bool {
        !self.is_finite()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(SmallVec::from_elem(0, self.rank()))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        if g.len() != self.rank() {
            return false;
        }
        match *self {
            Group::Cyclic { m } => (0..m).contains(&g.0[0]),
            _ => true,
        }
    }

    /// Validates `coords` as an element of this group.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        let g = GroupElement::new(coords);
        self.check(&g)?;
        Ok(g)
    }

    pub fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::NotAnElement {
                element: g.clone(),
                group: self.to_string(),
            })
        }
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        debug_assert!(self.contains(g) && self.contains(h));
        let out = match *self {
            Group::Integers | Group::Lattice { .. } => {
                g.0.iter()
                    .zip(h.0.iter())
                    .map(|(a, b)| a.checked_add(*b))
                    .collect::<Option<SmallVec<_>>>()
                    .ok_or(GroupError::Overflow)?
            }
            Group::Heisenberg => {
                let (x, y, z) = (g.0[0], g.0[1], g.0[2]);
                let (x2, y2, z2) = (h.0[0], h.0[1], h.0[2]);
                let zz = x
                    .checked_mul(y2)
                    .and_then(|c| c.checked_add(z))
                    .and_then(|c| c.checked_add(z2))
                    .ok_or(GroupError::Overflow)?;
                SmallVec::from_slice(&[
                    x.checked_add(x2).ok_or(GroupError::Overflow)?,
                    y.checked_add(y2).ok_or(GroupError::Overflow)?,
                    zz,
                ])
            }
            Group::Cyclic { m } => {
                let r = (i128::from(g.0[0]) + i128::from(h.0[0])).rem_euclid(i128::from(m));
                SmallVec::from_elem(r as i64, 1)
            }
        };
        Ok(GroupElement(out))
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        let out = match *self {
            Group::Integers | Group::Lattice { .. } => {
                g.0.iter()
                    .map(|a| a.checked_neg())
                    .collect::<Option<SmallVec<_>>>()
                    .ok_or(GroupError::Overflow)?
            }
            Group::Heisenberg => {
                let (x, y, z) = (g.0[0], g.0[1], g.0[2]);
                // (x,y,z)^{-1} = (-x, -y, xy - z)
                let zz = x
                    .checked_mul(y)
                    .and_then(|c| c.checked_sub(z))
                    .ok_or(GroupError::Overflow)?;
                SmallVec::from_slice(&[
                    x.checked_neg().ok_or(GroupError::Overflow)?,
                    y.checked_neg().ok_or(GroupError::Overflow)?,
                    zz,
                ])
            }
            Group::Cyclic { m } => SmallVec::from_elem((-g.0[0]).rem_euclid(m), 1),
        };
        Ok(GroupElement(out))
    }

    /// `g^n` by square-and-multiply; negative `n` uses the inverse.
    pub fn pow(&self, g: &GroupElement, n: i64) -> Result<GroupElement, GroupError> {
        let mut base = if n < 0 { self.inv(g)? } else { g.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Smallest `n <= n_max` with `a^n = e`.
    ///
    /// Torsion-free groups answer analytically; cyclic groups enumerate.
    pub fn torsion_order(&self, a: &GroupElement, n_max: u64) -> Option<u64> {
        let e = self.identity();
        if *a == e {
            return Some(1);
        }
        if self.is_torsion_free() {
            return None;
        }
        let mut acc = a.clone();
        for n in 1..=n_max {
            if acc == e {
                return Some(n);
            }
            acc = self.mul(&acc, a).ok()?;
        }
        None
    }

    /// Smallest `M` such that `K ∩ K·a^{±n} = ∅` for every `M < n <= n_max`.
    ///
    /// Returns `None` when `K` still meets `K·a^{±n_max}`: no separation has been
    /// observed inside the probing window.
    pub fn separation_constant(&self, k: &CompactSet, a: &GroupElement, n_max: u64) -> Result<Option<u64>, GroupError> {
        if let Some(order) = self.torsion_order(a, n_max) {
            return Err(GroupError::TorsionElement {
                element: a.clone(),
                order,
            });
        }
        let a_inv = self.inv(a)?;
        let mut fwd: Vec<GroupElement> = k.iter().cloned().collect();
        let mut bwd = fwd.clone();
        let mut last_hit = 0u64;
        for n in 1..=n_max {
            let mut hit = false;
            for (f, b) in fwd.iter_mut().zip(bwd.iter_mut()) {
                *f = self.mul(f, a)?;
                *b = self.mul(b, &a_inv)?;
                hit |= k.contains(f) || k.contains(b);
            }
            if hit {
                last_hit = n;
            }
        }
        if last_hit == n_max {
            Ok(None)
        } else {
            Ok(Some(last_hit))
        }
    }
}

/// Finite set of group elements standing in for a compact set; its Haar
/// measure is its cardinality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<GroupElement>", into = "Vec<GroupElement>")]
pub struct CompactSet {
    elements: BTreeSet<GroupElement>,
}

impl TryFrom<Vec<GroupElement>> for CompactSet {
    type Error = GroupError;

    fn try_from(v: Vec<GroupElement>) -> Result<Self, Self::Error> {
        CompactSet::new(v)
    }
}

impl From<CompactSet> for Vec<GroupElement> {
    fn from(k: CompactSet) -> Self {
        k.elements.into_iter().collect()
    }
}

impl CompactSet {
    pub fn new(elements: impl IntoIterator<Item = GroupElement>) -> Result<Self, GroupError> {
        let elements: BTreeSet<_> = elements.into_iter().collect();
        if elements.is_empty() {
            return Err(GroupError::EmptySet);
        }
        Ok(CompactSet { elements })
    }

    /// Integer box `lo <= coords <= hi` (inclusive), validated against `group`.
    pub fn integer_box(group: &Group, lo: &[i64], hi: &[i64]) -> Result<Self, GroupError> {
        let rank = group.rank();
        if lo.len() != rank || hi.len() != rank {
            return Err(GroupError::InvalidGroup(format!(
                "box bounds must have {rank} coordinates"
            )));
        }
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for (&l, &h) in lo.iter().zip(hi) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (l..=h).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        let elements = out
            .into_iter()
            .map(|c| group.element(&c))
            .collect::<Result<Vec<_>, _>>()?;
        CompactSet::new(elements)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter()
    }

    /// Counting measure.
    pub fn measure(&self) -> usize {
        self.elements.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(c: &[i64]) -> GroupElement {
        GroupElement::new(c)
    }

    #[test]
    fn pow_examples() {
        assert_eq!(Group::Integers.pow(&el(&[1]), 5).unwrap(), el(&[5]));
        let h = Group::Heisenberg;
        for s in -20..=20 {
            assert_eq!(h.pow(&el(&[3, 0, 2]), s).unwrap(), el(&[3 * s, 0, 2 * s]));
        }
        let c6 = Group::Cyclic { m: 6 };
        assert_eq!(c6.pow(&el(&[2]), 3).unwrap(), c6.identity());
        assert_eq!(c6.pow(&el(&[2]), -1).unwrap(), el(&[4]));
        assert_eq!(h.pow(&el(&[1, 2, 3]), 0).unwrap(), h.identity());
    }

    #[test]
    fn heisenberg_product_and_inverse() {
        let h = Group::Heisenberg;
        assert_eq!(h.mul(&el(&[1, 2, 3]), &el(&[4, 5, 6])).unwrap(), el(&[5, 7, 14]));
        assert_eq!(h.inv(&el(&[1, 2, 3])).unwrap(), el(&[-1, -2, -1]));
        // Not abelian.
        assert_ne!(
            h.mul(&el(&[1, 0, 0]), &el(&[0, 1, 0])).unwrap(),
            h.mul(&el(&[0, 1, 0]), &el(&[1, 0, 0])).unwrap()
        );
    }

    #[test]
    fn torsion_orders() {
        assert_eq!(Group::Cyclic { m: 6 }.torsion_order(&el(&[2]), 100), Some(3));
        assert_eq!(Group::Cyclic { m: 6 }.torsion_order(&el(&[5]), 4), None);
        assert_eq!(Group::Integers.torsion_order(&el(&[1]), 100), None);
        assert_eq!(Group::Integers.torsion_order(&el(&[0]), 100), Some(1));
        let h = Group::Heisenberg;
        let a = el(&[3, 0, 2]);
        assert_eq!(h.torsion_order(&a, 1000), None);
        // Enumeration oracle for the analytic shortcut.
        for n in 1..=1000 {
            assert_ne!(h.pow(&a, n).unwrap(), h.identity());
        }
    }

    #[test]
    fn separation_examples() {
        let z = Group::Integers;
        let k = CompactSet::integer_box(&z, &[-5], &[5]).unwrap();
        assert_eq!(z.separation_constant(&k, &el(&[1]), 50).unwrap(), Some(10));
        let k0 = CompactSet::new([el(&[0])]).unwrap();
        assert_eq!(z.separation_constant(&k0, &el(&[1]), 50).unwrap(), Some(0));

        let h = Group::Heisenberg;
        let kb = CompactSet::integer_box(&h, &[-1, -1, -1], &[1, 1, 1]).unwrap();
        assert_eq!(h.separation_constant(&kb, &el(&[3, 0, 2]), 50).unwrap(), Some(0));

        // Window too short to see separation.
        assert_eq!(z.separation_constant(&k, &el(&[1]), 10).unwrap(), None);

        let c6 = Group::Cyclic { m: 6 };
        let kc = CompactSet::new([el(&[0])]).unwrap();
        assert!(matches!(
            c6.separation_constant(&kc, &el(&[2]), 50),
            Err(GroupError::TorsionElement { order: 3, .. })
        ));
    }

    #[test]
    fn overflow_is_an_error() {
        let z = Group::Integers;
        assert_eq!(z.mul(&el(&[i64::MAX]), &el(&[1])), Err(GroupError::Overflow));
        assert_eq!(z.pow(&el(&[i64::MAX / 2 + 1]), 2), Err(GroupError::Overflow));
        assert_eq!(z.inv(&el(&[i64::MIN])), Err(GroupError::Overflow));
    }

    #[test]
    fn membership_and_validation() {
        assert!(Group::Cyclic { m: 6 }.element(&[6]).is_err());
        assert!(Group::Heisenberg.element(&[1, 2]).is_err());
        assert!(Group::Lattice { d: 0 }.validate().is_err());
        assert!(CompactSet::new(Vec::new()).is_err());
        let spec: Group = serde_json::from_str(r#"{"kind":"Zd","d":2}"#).unwrap();
        assert_eq!(spec, Group::Lattice { d: 2 });
        let g: GroupElement = serde_json::from_str("[3,0,2]").unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "[3,0,2]");
    }

    fn group_and_triple() -> impl Strategy<Value = (Group, [GroupElement; 3])> {
        let small = -1000i64..1000;
        prop_oneof![
            Just(Group::Integers),
            Just(Group::Lattice { d: 2 }),
            Just(Group::Heisenberg),
            (1i64..50).prop_map(|m| Group::Cyclic { m }),
        ]
        .prop_flat_map(move |g| {
            let rank = g.rank();
            let m = match g {
                Group::Cyclic { m } => m,
                _ => 0,
            };
            let coord = proptest::collection::vec(small.clone(), rank).prop_map(move |mut v| {
                if m > 0 {
                    v[0] = v[0].rem_euclid(m);
                }
                GroupElement::from(v)
            });
            (Just(g), [coord.clone(), coord.clone(), coord])
        })
    }

    proptest! {
        #[test]
        fn group_axioms((g, [x, y, z]) in group_and_triple()) {
            let e = g.identity();
            let xy_z = g.mul(&g.mul(&x, &y).unwrap(), &z).unwrap();
            let x_yz = g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(xy_z, x_yz);
            prop_assert_eq!(g.mul(&e, &x).unwrap(), x.clone());
            prop_assert_eq!(g.mul(&x, &e).unwrap(), x.clone());
            let xi = g.inv(&x).unwrap();
            prop_assert_eq!(g.mul(&x, &xi).unwrap(), e.clone());
            prop_assert_eq!(g.mul(&xi, &x).unwrap(), e);
        }

        #[test]
        fn pow_is_a_homomorphism((g, [x, _, _]) in group_and_triple(), n in -50i64..=50, m in -50i64..=50) {
            let lhs = g.pow(&x, n + m).unwrap();
            let rhs = g.mul(&g.pow(&x, n).unwrap(), &g.pow(&x, m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn separation_constant_recheck(lo in -6i64..0, len in 0i64..8, step in 1i64..4) {
            let z = Group::Lattice { d: 2 };
            let k = CompactSet::integer_box(&z, &[lo, 0], &[lo + len, 1]).unwrap();
            let a = GroupElement::new(&[step, 0]);
            let n_max = 40;
            let m = z.separation_constant(&k, &a, n_max).unwrap().unwrap();
            for n in (m + 1)..=n_max {
                for sign in [1i64, -1] {
                    let an = z.pow(&a, sign * n as i64).unwrap();
                    for x in k.iter() {
                        prop_assert!(!k.contains(&z.mul(x, &an).unwrap()));
                    }
                }
            }
            if m > 0 {
                let an = z.pow(&a, m as i64).unwrap();
                prop_assert!(k.iter().any(|x| k.contains(&z.mul(x, &an).unwrap())));
            }
        }
    }
}
