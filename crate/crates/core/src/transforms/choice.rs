use super::TransformError;

/// A function `F: X^I -> X` that stays onto `X` whatever single coordinate
/// is held fixed. `X` is `0..domain` and tuples are read in mixed radix
/// with coordinate 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceFunction {
    domain: usize,
    arity: usize,
    table: Vec<usize>,
}

/// Builds a choice function: the sum modulo `|X|` for two coordinates, and
/// a super-majority vote defaulting to 0 for three or more.
///
/// With one coordinate the property asks a single value to cover `X`, so
/// only `|X| = 1` has a solution.
pub fn build_choice(x_size: usize, i_size: usize) -> Result<ChoiceFunction, TransformError> {
    if x_size == 0 || i_size == 0 || (i_size == 1 && x_size > 1) {
        return Err(TransformError::ChoiceArity { x_size, i_size });
    }
    let len = x_size
        .checked_pow(i_size as u32)
        .ok_or(TransformError::Budget {
            what: "choice table",
            needed: usize::MAX,
            budget: 1 << 24,
        })?;
    if len > 1 << 24 {
        return Err(TransformError::Budget {
            what: "choice table",
            needed: len,
            budget: 1 << 24,
        });
    }
    let mut table = Vec::with_capacity(len);
    let mut tuple = vec![0usize; i_size];
    let mut counts = vec![0usize; x_size];
    for code in 0..len {
        decode(code, x_size, &mut tuple);
        let value = if x_size == 1 {
            0
        } else if i_size == 2 {
            (tuple[0] + tuple[1]) % x_size
        } else {
            counts.iter_mut().for_each(|c| *c = 0);
            for &v in &tuple {
                counts[v] += 1;
            }
            counts.iter().position(|&c| c + 1 >= i_size).unwrap_or(0)
        };
        table.push(value);
    }
    Ok(ChoiceFunction {
        domain: x_size,
        arity: i_size,
        table,
    })
}

fn decode(mut code: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
}

impl ChoiceFunction {
    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.arity, "tuple length must match the arity");
        let code = tuple.iter().fold(0, |acc, &v| {
            assert!(v < self.domain, "tuple entry out of range");
            acc * self.domain + v
        });
        self.table[code]
    }

    /// Every `(i, x)` whose slice misses some value of `X`.
    pub fn surjectivity_failures(&self) -> Vec<(usize, usize)> {
        let mut hit = vec![vec![vec![false; self.domain]; self.domain]; self.arity];
        let mut tuple = vec![0usize; self.arity];
        for (code, &value) in self.table.iter().enumerate() {
            decode(code, self.domain, &mut tuple);
            for (i, &x) in tuple.iter().enumerate() {
                hit[i][x][value] = true;
            }
        }
        let mut out = Vec::new();
        for (i, per_x) in hit.iter().enumerate() {
            for (x, seen) in per_x.iter().enumerate() {
                if !seen.iter().all(|&b| b) {
                    out.push((i, x));
                }
            }
        }
        out
    }

    pub fn is_coordinate_surjective(&self) -> bool {
        self.surjectivity_failures().is_empty()
    }
}
