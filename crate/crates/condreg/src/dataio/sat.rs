//! A tiny clause-set satisfiability check used by the synthetic generator.
//!
//! The generator needs exact answers to questions of the form "is there an
//! assignment satisfying this term but no term of that DNF". Negating a DNF
//! gives a clause per term, so these are small CNF instances (tens of
//! variables, tens of short clauses) and a plain DPLL search with unit
//! propagation settles them instantly.

/// A literal as a signed 1-based variable index, CNF clauses as literal
/// lists. `fixed` pre-assigns variables (unit clauses, in effect).
pub(super) fn satisfiable(num_vars: usize, clauses: &[Vec<i32>], fixed: &[(usize, bool)]) -> bool {
    let mut assign: Vec<Option<bool>> = vec![None; num_vars];
    for &(var, value) in fixed {
        match assign[var] {
            Some(v) if v != value => return false,
            _ => assign[var] = Some(value),
        }
    }
    dpll(&mut assign, clauses)
}

fn literal_state(assign: &[Option<bool>], lit: i32) -> Option<bool> {
    assign[lit.unsigned_abs() as usize - 1].map(|v| v == (lit > 0))
}

fn dpll(assign: &mut Vec<Option<bool>>, clauses: &[Vec<i32>]) -> bool {
    // Unit propagation to a fixed point.
    let mut trail: Vec<usize> = Vec::new();
    loop {
        let mut propagated = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut satisfied = false;
            let mut open = 0;
            for &lit in clause {
                match literal_state(assign, lit) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match open {
                0 => {
                    // Conflict: undo this propagation level and fail.
                    for &v in &trail {
                        assign[v] = None;
                    }
                    return false;
                }
                1 => {
                    let lit = unassigned.unwrap();
                    let var = lit.unsigned_abs() as usize - 1;
                    assign[var] = Some(lit > 0);
                    trail.push(var);
                    propagated = true;
                }
                _ => {}
            }
        }
        if !propagated {
            break;
        }
    }

    let branch = assign.iter().position(Option::is_none);
    let result = match branch {
        None => true,
        Some(var) => [true, false].iter().any(|&value| {
            assign[var] = Some(value);
            let ok = dpll(assign, clauses);
            if !ok {
                assign[var] = None;
            }
            ok
        }),
    };
    if !result {
        for &v in &trail {
            assign[v] = None;
        }
    }
    result
}
