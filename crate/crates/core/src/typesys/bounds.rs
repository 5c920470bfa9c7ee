use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::HflType;

/// Default budget for intermediate results, in decimal digits.
pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("bound {expr} exceeds the budget of {budget} decimal digits")]
    BudgetExceeded { expr: String, budget: u64 },
}

fn budget_bits(budget: u64) -> u64 {
    // log2(10) < 3.33
    budget.saturating_mul(333) / 100 + 1
}

fn exceeded(expr: impl Into<String>, budget: u64) -> BoundError {
    BoundError::BudgetExceeded { expr: expr.into(), budget }
}

fn pow_checked(base: &BigUint, exp: &BigUint, budget: u64, expr: &str) -> Result<BigUint, BoundError> {
    if exp.is_zero() {
        return Ok(BigUint::one());
    }
    if base.is_zero() || base.is_one() {
        return Ok(base.clone());
    }
    let e = exp
        .to_u64()
        .filter(|e| e.saturating_mul(base.bits()) <= budget_bits(budget) * 2)
        .ok_or_else(|| exceeded(expr, budget))?;
    let r = num_traits::pow(base.clone(), e as usize);
    if r.bits() > budget_bits(budget) {
        return Err(exceeded(expr, budget));
    }
    Ok(r)
}

fn pow2(exp: &BigUint, budget: u64, expr: &str) -> Result<BigUint, BoundError> {
    let e = exp
        .to_u64()
        .filter(|&e| e < budget_bits(budget))
        .ok_or_else(|| exceeded(expr, budget))?;
    Ok(BigUint::one() << e)
}

/// `tower(n, 0) = n`, `tower(n, k+1) = 2^tower(n, k)`.
pub fn tower(n: &BigUint, k: u32, budget: u64) -> Result<BigUint, BoundError> {
    let expr = format!("tower({n}, {k})");
    let mut x = n.clone();
    for _ in 0..k {
        x = pow2(&x, budget, &expr)?;
    }
    Ok(x)
}

/// `x ≤ tower(n, k)`, decided without computing the tower.
pub fn leq_tower(x: &BigUint, n: &BigUint, k: u32) -> bool {
    if k == 0 {
        return x <= n;
    }
    if x <= &BigUint::one() {
        return true;
    }
    // x ≤ 2^t  iff  x - 1 < 2^t  iff  bits(x - 1) ≤ t
    leq_tower(&BigUint::from((x - 1u32).bits()), n, k - 1)
}

/// `F_0(p) = 2^p`, `F_{k+1}(p) = 2^(p * F_k(p))`: the size of the `k`-th chain type over `p` states.
pub fn f_k(k: u32, p: u64, budget: u64) -> Result<BigUint, BoundError> {
    let expr = format!("F({k}, {p})");
    let p = BigUint::from(p);
    let mut x = pow2(&p, budget, &expr)?;
    for _ in 0..k {
        x = pow2(&(&p * &x), budget, &expr)?;
    }
    Ok(x)
}

/// Upper bound on the number of elements of a type over `n` states.
pub fn lattice_size_bound(ty: &HflType, n: u64, budget: u64) -> Result<BigUint, BoundError> {
    let (ord, mar) = (ty.ord(), ty.mar());
    let expr = format!("tower({n}*({mar}+{ord})^{ord}, {})", ord + 1);
    let base = pow_checked(&BigUint::from(mar + ord), &BigUint::from(ord), budget, &expr)?;
    tower(&(BigUint::from(n) * base), ord + 1, budget).map_err(|_| exceeded(expr, budget))
}

/// `x ≤ lattice_size_bound(τ, n)`, exact even when the bound exceeds every digit budget.
pub fn within_lattice_size_bound(x: &BigUint, ty: &HflType, n: u64) -> bool {
    let (ord, mar) = (ty.ord(), ty.mar());
    let base = BigUint::from(n) * num_traits::pow(BigUint::from(mar + ord), ord as usize);
    leq_tower(x, &base, ord + 1)
}

/// Number of types of order at most `k` and maximal arity at most `m`: `m^(k * m^(k-1))`.
pub fn type_count_bound(k: u32, m: u32, budget: u64) -> Result<BigUint, BoundError> {
    if k == 0 {
        return Ok(BigUint::one());
    }
    let expr = format!("{m}^({k}*{m}^{})", k - 1);
    let m_big = BigUint::from(m);
    let inner = pow_checked(&m_big, &BigUint::from(k - 1), budget, &expr)?;
    pow_checked(&m_big, &(BigUint::from(k) * inner), budget, &expr)
}

/// Upper bound on the height of the monotone lattice of a type over `n` states.
pub fn height_bound(ty: &HflType, n: u64, budget: u64) -> Result<BigUint, BoundError> {
    let (ord, mar) = (ty.ord(), ty.mar());
    let n1 = BigUint::from(n + 1);
    if ord == 0 {
        return Ok(n1);
    }
    let expr = format!("({n}+1)*tower({n}*({mar}+{ord}-1)^({ord}-1), {ord})^{mar}");
    let inner = pow_checked(&BigUint::from(mar + ord - 1), &BigUint::from(ord - 1), budget, &expr)?;
    let t = tower(&(BigUint::from(n) * inner), ord, budget).map_err(|_| exceeded(&expr, budget))?;
    Ok(n1 * pow_checked(&t, &BigUint::from(mar), budget, &expr)?)
}

/// Upper bound on the size of the model-checking game for a fixpoint-free formula
/// of closure size `size` with `lam_vars` distinct λ-variables in the fragment `(k, m)`.
pub fn game_size_bound(
    n: u64,
    size: u64,
    k: u32,
    m: u32,
    lam_vars: u64,
    budget: u64,
) -> Result<BigUint, BoundError> {
    let (k, m) = (k.max(1), m.max(1));
    let expr = format!("4*{n}^2*{size}^2*(A*tower({n}*({k}-1+{m})^({k}-1), {k}))^(2*({m}+{lam_vars}))");
    let m_big = BigUint::from(m);
    let a = if k == 1 {
        m_big.clone()
    } else {
        let e = BigUint::from(k - 1) * pow_checked(&m_big, &BigUint::from(k - 2), budget, &expr)?;
        pow_checked(&m_big, &e, budget, &expr)?
    };
    let inner = pow_checked(&BigUint::from(k - 1 + m), &BigUint::from(k - 1), budget, &expr)?;
    let t = tower(&(BigUint::from(n) * inner), k, budget).map_err(|_| exceeded(&expr, budget))?;
    let exp = BigUint::from(2 * (m as u64 + lam_vars));
    let body = pow_checked(&(a * t), &exp, budget, &expr)?;
    let n = BigUint::from(n);
    let size = BigUint::from(size);
    Ok(BigUint::from(4u32) * &n * &n * &size * &size * body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typesys::Variance;

    #[test]
    fn tower_comparison_without_the_tower() {
        let two = BigUint::from(2u32);
        for x in 0u32..=70000 {
            let x = BigUint::from(x);
            assert_eq!(leq_tower(&x, &two, 2), x <= BigUint::from(16u32));
            assert_eq!(leq_tower(&x, &two, 3), x <= BigUint::from(65536u32));
        }
        let huge = BigUint::one() << 4096u32;
        assert!(leq_tower(&huge, &BigUint::from(9u32), 3));
        assert!(!leq_tower(&huge, &BigUint::from(3u32), 2));
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn tower_values() {
        let b = DEFAULT_DIGIT_BUDGET;
        let got: Vec<_> = (0..4).map(|m| tower(&big(1), m, b).unwrap()).collect();
        assert_eq!(got, vec![big(1), big(2), big(4), big(16)]);
        assert_eq!(tower(&big(1), 5, b).unwrap(), BigUint::one() << 65536u32);
        assert!(matches!(tower(&big(1), 6, b), Err(BoundError::BudgetExceeded { .. })));
    }

    #[test]
    fn chain_sizes() {
        let b = DEFAULT_DIGIT_BUDGET;
        assert_eq!(f_k(0, 2, b).unwrap(), big(4));
        assert_eq!(f_k(1, 2, b).unwrap(), big(256));
        assert_eq!(f_k(1, 1, b).unwrap(), big(4));
        assert_eq!(f_k(2, 1, b).unwrap(), big(16));
        assert_eq!(f_k(0, 3, b).unwrap(), big(8));
    }

    #[test]
    fn lattice_bounds() {
        let b = DEFAULT_DIGIT_BUDGET;
        assert_eq!(lattice_size_bound(&HflType::Pr, 3, b).unwrap(), big(8));
        assert_eq!(lattice_size_bound(&HflType::Pr, 1, b).unwrap(), big(2));
        let t = HflType::arrow(HflType::Pr, Variance::Plus, HflType::Pr);
        assert_eq!(lattice_size_bound(&t, 1, b).unwrap(), big(16));
    }

    #[test]
    fn type_counts() {
        let b = DEFAULT_DIGIT_BUDGET;
        for m in 0..6 {
            assert_eq!(type_count_bound(1, m, b).unwrap(), big(m as u64));
        }
        assert_eq!(type_count_bound(2, 2, b).unwrap(), big(16));
    }

    #[test]
    fn heights() {
        let b = DEFAULT_DIGIT_BUDGET;
        assert_eq!(height_bound(&HflType::Pr, 3, b).unwrap(), big(4));
        let t = HflType::arrow(HflType::Pr, Variance::Plus, HflType::Pr);
        // (n+1) * tower(n * 1^0, 1)^1 = 3 * 4
        assert_eq!(height_bound(&t, 2, b).unwrap(), big(12));
    }

    #[test]
    fn game_bound_first_order() {
        let b = DEFAULT_DIGIT_BUDGET;
        // 4 * 1 * 1 * (1 * 2^1)^(2 * 1)
        assert_eq!(game_size_bound(1, 1, 1, 1, 0, b).unwrap(), big(16));
    }
}
