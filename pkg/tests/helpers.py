from volterra_decay.problem import Family, Forcing, Nonlinearity, Problem

ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def make_problem(lam=-0.5, b=2, A=0.1, a1=1.0, a=2.0, family=Family.INTEGER_POWER):
    return Problem(a, Nonlinearity(family, lam, b), Forcing(A, a1))
