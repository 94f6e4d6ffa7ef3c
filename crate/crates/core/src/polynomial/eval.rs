use crate::field::{Field, FieldElement, FieldError};
use crate::scalar::Scalar;

use super::{PolyError, SparsePoly};

/// A polynomial whose coefficients have been mapped into a field once, for
/// repeated evaluation.
#[derive(Debug, Clone)]
pub struct FieldPoly {
    field: Field,
    nvars: usize,
    terms: Vec<(Vec<u32>, FieldElement)>,
    max_power: u32,
}

impl FieldPoly {
    pub fn compile<T: Scalar>(poly: &SparsePoly<T>, field: Field) -> Result<Self, PolyError> {
        let mut terms = Vec::with_capacity(poly.num_terms());
        for (e, c) in poly.terms() {
            let c = c.to_field(field)?;
            if !c.is_zero() {
                terms.push((e.as_slice().to_vec(), c));
            }
        }
        let max_power = terms
            .iter()
            .flat_map(|(e, _)| e.iter().copied())
            .max()
            .unwrap_or(0);
        Ok(FieldPoly {
            field,
            nvars: poly.nvars(),
            terms,
            max_power,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                left: self.nvars,
                right: point.len(),
            });
        }
        if let Some(bad) = point.iter().find(|x| x.field() != self.field) {
            return Err(FieldError::FieldMismatch {
                left: self.field,
                right: bad.field(),
            }
            .into());
        }
        if let Some(p) = self.field.modulus() {
            let residues: Vec<u64> = point
                .iter()
                .map(|x| x.residue_value().expect("prime field element"))
                .collect();
            return Ok(self
                .field
                .embed_i64(self.eval_residues(p, &residues) as i64));
        }
        // powers[i][e] = x_i^e
        let powers: Vec<Vec<FieldElement>> = point
            .iter()
            .map(|x| {
                let mut row = vec![self.field.one()];
                for e in 1..=self.max_power as usize {
                    let next = row[e - 1].mul(x).expect("same field");
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &p) in e.iter().enumerate() {
                if p > 0 {
                    t = t.mul(&powers[i][p as usize]).expect("same field");
                }
            }
            acc = acc.add(&t).expect("same field");
        }
        Ok(acc)
    }

    /// Evaluation over GF(p) on canonical residues.
    pub(crate) fn eval_residues(&self, p: u64, point: &[u64]) -> u64 {
        let p128 = p as u128;
        let mut acc: u128 = 0;
        for (e, c) in &self.terms {
            let mut t = c.residue_value().expect("prime field coefficient") as u128;
            for (i, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    t = t * point[i] as u128 % p128;
                }
            }
            acc = (acc + t) % p128;
        }
        acc as u64
    }
}
