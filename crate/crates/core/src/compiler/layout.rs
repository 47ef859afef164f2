use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bijection between virtual (circuit) and physical (device) qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    v2p: Vec<usize>,
    p2v: Vec<usize>,
}

impl Layout {
    /// Identity mapping `q_i -> Q_i` over the whole device.
    pub fn trivial(circuit_qubits: usize, device_qubits: usize) -> Result<Self> {
        if circuit_qubits > device_qubits {
            return Err(Error::DeviceTooSmall {
                needed: circuit_qubits,
                available: device_qubits,
            });
        }
        let ids: Vec<usize> = (0..device_qubits).collect();
        Ok(Self {
            v2p: ids.clone(),
            p2v: ids,
        })
    }

    pub fn from_virtual_to_physical(v2p: Vec<usize>) -> Result<Self> {
        let mut p2v = vec![usize::MAX; v2p.len()];
        for (v, &p) in v2p.iter().enumerate() {
            if p >= v2p.len() || p2v[p] != usize::MAX {
                return Err(Error::InvalidParameter("layout is not a bijection".into()));
            }
            p2v[p] = v;
        }
        Ok(Self { v2p, p2v })
    }

    pub fn len(&self) -> usize {
        self.v2p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v2p.is_empty()
    }

    #[inline]
    pub fn physical(&self, virt: usize) -> usize {
        self.v2p[virt]
    }

    #[inline]
    pub fn virtual_at(&self, phys: usize) -> usize {
        self.p2v[phys]
    }

    pub fn virtual_to_physical(&self) -> &[usize] {
        &self.v2p
    }

    /// Exchanges whichever virtual qubits sit on physical qubits `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.p2v[a], self.p2v[b]);
        self.p2v.swap(a, b);
        self.v2p[va] = b;
        self.v2p[vb] = a;
    }

    pub fn inverse(&self) -> Self {
        Self {
            v2p: self.p2v.clone(),
            p2v: self.v2p.clone(),
        }
    }

    /// `self` after `other`: virtual `q` maps to `self.physical(other.physical(q))`.
    pub fn then(&self, other: &Layout) -> Self {
        let v2p = other.v2p.iter().map(|&p| self.v2p[p]).collect();
        Self::from_virtual_to_physical(v2p).expect("composition of bijections")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_is_identity() {
        let l = Layout::trivial(4, 4).unwrap();
        assert!((0..4).all(|q| l.physical(q) == q && l.virtual_at(q) == q));
        assert_eq!(l.then(&l.inverse()), l);
        assert_eq!(l.then(&l), l);
        assert!(matches!(
            Layout::trivial(5, 4),
            Err(Error::DeviceTooSmall { needed: 5, available: 4 })
        ));
    }

    #[test]
    fn swap_keeps_bijection() {
        let mut l = Layout::trivial(3, 4).unwrap();
        l.swap_physical(0, 3);
        l.swap_physical(3, 1);
        assert_eq!(l.virtual_to_physical(), &[1, 3, 2, 0]);
        for v in 0..4 {
            assert_eq!(l.virtual_at(l.physical(v)), v);
        }
        let id = Layout::trivial(4, 4).unwrap();
        assert_eq!(l.then(&l.inverse()), id);
        assert!(Layout::from_virtual_to_physical(vec![0, 0]).is_err());
    }
}
