"""Generate closed forms of the built-in manufactured solution.

Writes src/manufactured_generated.inc. Run from the repository root:

    python3 tools/gen_manufactured.py
"""
import pathlib

import sympy as sp

x, y, t, kappa, mu_s = sp.symbols("x y t kappa mu_s", real=True)
pi = sp.pi

c = sp.exp(-t) * sp.cos(pi * x) * sp.cos(pi * y)
psi = sp.exp(-t) * sp.sin(pi * x) ** 2 * sp.sin(pi * y) ** 2
v = sp.Matrix([sp.diff(psi, y), -sp.diff(psi, x)])
p = sp.exp(-t) * sp.cos(pi * x)


def lap(f):
    return sp.diff(f, x, 2) + sp.diff(f, y, 2)


def grad(f):
    return sp.Matrix([sp.diff(f, x), sp.diff(f, y)])


# Ginzburg-Landau: Phi'(c) = c^3 - c.
mu = c**3 - c - kappa * lap(c)
f_c = sp.diff(c, t) - lap(mu) + (v.T * grad(c))[0] + c * (sp.diff(v[0], x) + sp.diff(v[1], y))
conv = sp.Matrix([(v.T * grad(v[k]))[0] for k in range(2)])
f_v = sp.diff(v, t) + conv - mu_s * sp.Matrix([lap(v[0]), lap(v[1])]) + grad(p) + c * grad(mu)

outputs = {
    "c": c,
    "c_x": sp.diff(c, x),
    "c_y": sp.diff(c, y),
    "mu": mu,
    "mu_x": sp.diff(mu, x),
    "mu_y": sp.diff(mu, y),
    "v0": v[0],
    "v1": v[1],
    "v0_x": sp.diff(v[0], x),
    "v0_y": sp.diff(v[0], y),
    "v1_x": sp.diff(v[1], x),
    "v1_y": sp.diff(v[1], y),
    "p": p,
    "f_c": f_c,
    "f_v0": f_v[0],
    "f_v1": f_v[1],
}

lines = [
    "// Generated by tools/gen_manufactured.py. Do not edit.",
    "// c = e^{-t} cos(pi x) cos(pi y), v = curl(e^{-t} sin^2(pi x) sin^2(pi y)),",
    "// p = e^{-t} cos(pi x), mu = c^3 - c - kappa lap(c).",
    "",
    "struct ManufacturedValues {",
]
lines += [f"  double {name} = 0.0;" for name in outputs]
lines += [
    "};",
    "",
    "inline ManufacturedValues manufactured_values(double x, double y, double t, double kappa,",
    "                                              double mu_s) {",
    "  (void)kappa;",
    "  (void)mu_s;",
    "  ManufacturedValues r;",
]
names = list(outputs)
exprs = [sp.simplify(outputs[n]) for n in names]
subs, reduced = sp.cse(exprs, symbols=sp.numbered_symbols("s"))
for sym, expr in subs:
    lines.append(f"  const double {sym} = {sp.ccode(expr)};")
for name, expr in zip(names, reduced):
    lines.append(f"  r.{name} = {sp.ccode(expr)};")
lines += ["  return r;", "}", ""]

out = pathlib.Path(__file__).resolve().parent.parent / "src" / "manufactured_generated.inc"
out.write_text("\n".join(lines))
print(f"wrote {out}")
