use crate::error::Result;

/// Outcome of an exact linear solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinSolve<T> {
    Unique(Vec<T>),
    Inconsistent,
    /// Consistent but with free columns; a witness solution is returned.
    Underdetermined(Vec<T>),
}

/// Gaussian elimination over an arbitrary exact field, supplied as closures.
/// Used over GF(2)(t_1,...,t_n) and over residue fields mod p.
pub fn solve_linear<T: Clone>(
    mut a: Vec<Vec<T>>,
    mut b: Vec<T>,
    zero: T,
    is_zero: &dyn Fn(&T) -> bool,
    add: &dyn Fn(&T, &T) -> T,
    mul: &dyn Fn(&T, &T) -> T,
    inv: &dyn Fn(&T) -> Result<T>,
) -> Result<LinSolve<T>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    debug_assert_eq!(b.len(), rows);
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(r, pr);
        b.swap(r, pr);
        let piv_inv = inv(&a[r][c])?;
        for z in c..cols {
            a[r][z] = mul(&a[r][z], &piv_inv);
        }
        b[r] = mul(&b[r], &piv_inv);
        for i in 0..rows {
            if i != r && !is_zero(&a[i][c]) {
                let f = a[i][c].clone();
                for z in c..cols {
                    let t = mul(&f, &a[r][z]);
                    a[i][z] = add(&a[i][z], &t);
                }
                let t = mul(&f, &b[r]);
                b[i] = add(&b[i], &t);
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Rows beyond the rank must have zero right-hand side.
    for i in r..rows {
        if !is_zero(&b[i]) {
            return Ok(LinSolve::Inconsistent);
        }
    }
    let mut x = vec![zero; cols];
    let mut free = false;
    for c in 0..cols {
        match pivot_of_col[c] {
            Some(pr) => x[c] = b[pr].clone(),
            None => free = true,
        }
    }
    if free {
        Ok(LinSolve::Underdetermined(x))
    } else {
        Ok(LinSolve::Unique(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::RatFun;

    fn solve(a: Vec<Vec<RatFun>>, b: Vec<RatFun>) -> LinSolve<RatFun> {
        solve_linear(
            a,
            b,
            RatFun::zero(),
            &|x| x.is_zero(),
            &|x, y| x.add(y),
            &|x, y| x.mul(y),
            &|x| x.inv(),
        )
        .unwrap()
    }

    #[test]
    fn unique_solution() {
        let t = RatFun::var(0);
        // [1 t; 0 1] x = [t+1, 1] => x = [1, 1]
        let a = vec![
            vec![RatFun::one(), t.clone()],
            vec![RatFun::zero(), RatFun::one()],
        ];
        let b = vec![t.add(&RatFun::one()), RatFun::one()];
        match solve(a, b) {
            LinSolve::Unique(x) => {
                assert_eq!(x, vec![RatFun::one(), RatFun::one()]);
            }
            other => panic!("expected unique, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_detected() {
        let a = vec![vec![RatFun::one()], vec![RatFun::one()]];
        let b = vec![RatFun::one(), RatFun::zero()];
        assert_eq!(solve(a, b), LinSolve::Inconsistent);
    }

    #[test]
    fn underdetermined_detected() {
        let a = vec![vec![RatFun::one(), RatFun::one()]];
        let b = vec![RatFun::one()];
        match solve(a, b) {
            LinSolve::Underdetermined(_) => {}
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }
}
