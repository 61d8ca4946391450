//! Sums over vertex maps as tensor-network contractions, eliminating variables of least degree
//! first.

/// A dense table over a list of variables, row-major in the listed order.
#[derive(Debug, Clone)]
pub(crate) struct Factor {
    pub vars: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn unary(var: usize, table: Vec<f64>) -> Factor {
        Factor {
            vars: vec![var],
            table,
        }
    }

    pub fn binary(a: usize, b: usize, table: Vec<f64>) -> Factor {
        Factor {
            vars: vec![a, b],
            table,
        }
    }
}

fn strides(vars: &[usize], dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; vars.len()];
    for i in (0..vars.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[vars[i + 1]];
    }
    s
}

/// Multiplies the factors mentioning `v` and sums `v` out.
fn eliminate(v: usize, dims: &[usize], factors: Vec<Factor>) -> Factor {
    let mut scope: Vec<usize> = factors
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .filter(|&x| x != v)
        .collect();
    scope.sort_unstable();
    scope.dedup();
    // Position of every variable of each factor within `full = scope ++ [v]`.
    let mut full = scope.clone();
    full.push(v);
    let maps: Vec<(Vec<usize>, Vec<usize>)> = factors
        .iter()
        .map(|f| {
            let pos = f
                .vars
                .iter()
                .map(|x| full.iter().position(|y| y == x).expect("in scope"))
                .collect();
            (pos, strides(&f.vars, dims))
        })
        .collect();
    let size: usize = scope.iter().map(|&x| dims[x]).product();
    let mut table = vec![0.0; size];
    let mut index = vec![0usize; full.len()];
    for (cell, out) in table.iter_mut().enumerate() {
        let mut rest = cell;
        for k in (0..scope.len()).rev() {
            index[k] = rest % dims[scope[k]];
            rest /= dims[scope[k]];
        }
        let mut sum = 0.0;
        for x in 0..dims[v] {
            index[scope.len()] = x;
            let mut prod = 1.0;
            for (f, (pos, st)) in factors.iter().zip(&maps) {
                let offset: usize = pos.iter().zip(st).map(|(&p, &s)| index[p] * s).sum();
                prod *= f.table[offset];
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
        }
        *out = sum;
    }
    Factor { vars: scope, table }
}

/// `Σ_{x_0..x_{n-1}} Π_f f(x)` for variables with the given domain sizes.
pub(crate) fn contract(dims: &[usize], mut factors: Vec<Factor>) -> f64 {
    let mut result = 1.0;
    let mut mentioned = vec![false; dims.len()];
    for f in &factors {
        for &x in &f.vars {
            mentioned[x] = true;
        }
    }
    for (x, &m) in mentioned.iter().enumerate() {
        if !m {
            result *= dims[x] as f64;
        }
    }
    loop {
        // Variable with the fewest neighbours in the current interaction graph.
        let mut best: Option<(usize, usize)> = None;
        for x in 0..dims.len() {
            let mut nbrs: Vec<usize> = factors
                .iter()
                .filter(|f| f.vars.contains(&x))
                .flat_map(|f| f.vars.iter().copied())
                .collect();
            if nbrs.is_empty() {
                continue;
            }
            nbrs.sort_unstable();
            nbrs.dedup();
            if best.is_none_or(|(_, d)| nbrs.len() < d) {
                best = Some((x, nbrs.len()));
            }
        }
        let Some((v, _)) = best else { break };
        let (with, without): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&v));
        factors = without;
        factors.push(eliminate(v, dims, with));
    }
    for f in factors {
        result *= f.table[0];
    }
    result
}

/// Largest table built by [`contract`] for factors over the given variable sets.
pub(crate) fn largest_table(dims: &[usize], scopes: &[Vec<usize>]) -> f64 {
    let mut scopes: Vec<Vec<usize>> = scopes.to_vec();
    let mut largest = 1.0f64;
    loop {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for x in 0..dims.len() {
            let mut nbrs: Vec<usize> = scopes
                .iter()
                .filter(|s| s.contains(&x))
                .flat_map(|s| s.iter().copied())
                .collect();
            if nbrs.is_empty() {
                continue;
            }
            nbrs.sort_unstable();
            nbrs.dedup();
            if best.as_ref().is_none_or(|(_, b)| nbrs.len() < b.len()) {
                best = Some((x, nbrs));
            }
        }
        let Some((v, nbrs)) = best else { break };
        let scope: Vec<usize> = nbrs.into_iter().filter(|&x| x != v).collect();
        largest = largest.max(scope.iter().map(|&x| dims[x] as f64).product());
        scopes.retain(|s| !s.contains(&v));
        scopes.push(scope);
    }
    largest
}

/// The same sum by visiting every assignment.
#[cfg(test)]
pub(crate) fn contract_brute_force(dims: &[usize], factors: &[Factor]) -> f64 {
    let n = dims.len();
    let total: usize = dims.iter().product();
    let st: Vec<Vec<usize>> = factors.iter().map(|f| strides(&f.vars, dims)).collect();
    let mut index = vec![0usize; n];
    let mut sum = 0.0;
    for cell in 0..total {
        let mut rest = cell;
        for k in (0..n).rev() {
            index[k] = rest % dims[k];
            rest /= dims[k];
        }
        let mut prod = 1.0;
        for (f, s) in factors.iter().zip(&st) {
            let offset: usize = f.vars.iter().zip(s).map(|(&x, &s)| index[x] * s).sum();
            prod *= f.table[offset];
        }
        sum += prod;
    }
    sum
}
