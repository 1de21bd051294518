"""Plain-text tables for audit, selection, fit and dynamics reports."""

from .selection import EQUALIZE, KEEP

GLYPHS = {EQUALIZE: "EQ", KEEP: "KEEP"}


def glyph(verdict):
    return GLYPHS.get(verdict, "--")


def table(header, rows):
    """Left-aligned first column, right-aligned others, two-space gutters."""
    cells = [[str(c) for c in header]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for r in cells:
        parts = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def _num(v, fmt=".4g"):
    return "--" if v is None else format(v, fmt)


def audit_grid(reports):
    """One row per criterion, one column per eigenvalue pair."""
    width = max((len(r.pairs) for r in reports), default=0)
    header = ["criterion", "threshold"] + [str(j + 1) for j in range(width)]
    rows = []
    for r in reports:
        glyphs = [glyph(pair.verdict) for pair in r.pairs]
        rows.append([r.criterion.kind.value.upper(), _num(r.threshold)] + glyphs
                    + [""] * (width - len(glyphs)))
    return table(header, rows)


def audit_detail(report):
    rows = [[p.j, _num(p.ell_j, ".6g"), _num(p.ell_j1, ".6g"), _num(p.delta), glyph(p.verdict)]
            for p in report.pairs]
    return table(["j", "ell_j", "ell_j+1", "delta", "verdict"], rows)


def render_audit(reports, n, p):
    out = [f"n = {n}, p = {p}, pairs shown = {max((len(r.pairs) for r in reports), default=0)}\n"]
    if p < 2:
        out.append("no adjacent eigenvalue pairs (p = 1)\n")
        return "".join(out)
    out.append(audit_grid(reports))
    if len(reports) == 1:
        out.append("\n" + audit_detail(reports[0]))
    for r in reports:
        if r.note:
            out.append(f"note ({r.criterion.kind.value}): {r.note}\n")
    return "".join(out)


def render_scores(scores, chosen=None):
    rows = []
    for gamma, s in scores:
        mark = "*" if gamma == chosen else ""
        rows.append([str(gamma) + mark, s.kappa, _num(s.log_likelihood, ".6f"),
                     _num(s.bic, ".6f"), _num(s.aic, ".6f"), _num(s.aicc, ".6f")])
    return table(["type", "kappa", "loglik", "bic", "aic", "aicc"], rows)


def render_selection(result):
    crit = "likelihood" if result.criterion is None else result.criterion.kind.value
    out = [f"strategy = {result.strategy}, criterion = {crit}"]
    if result.linkage:
        out.append(f", linkage = {result.linkage}")
    out.append(f"\ncandidates evaluated = {len(result.scores)}\nchosen = {result.chosen}\n\n")
    out.append(render_scores(result.scores, result.chosen))
    for w in result.warnings:
        out.append(f"warning: {w}\n")
    return "".join(out)


def render_fit(model, model_score):
    out = [f"type = {model.gamma}  (n = {model.n}, p = {model.p}, d = {model.d})\n"]
    if model.boundary_degenerate:
        out.append("warning: adjacent block eigenvalues are equal (boundary fit)\n")
    rows = [[k + 1, g, _num(lam, ".6g")]
            for k, (g, lam) in enumerate(zip(model.gamma.parts, model.block_eigenvalues))]
    out.append(table(["block", "dim", "eigenvalue"], rows))
    out.append("\n" + render_scores([(model.gamma, model_score)]))
    return "".join(out)


def render_dynamics(result):
    lines = []
    for n in result.spec.n_grid:
        counts = result.counts[n]
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].d, kv[0].parts))
        freq = ", ".join(f"({g}) {c / result.spec.replications:.2f}" for g, c in ranked)
        lines.append([n, str(result.modal(n)), freq])
    out = table(["n", "modal", "selection frequencies"], lines)
    types = sorted(result.mean_bic[result.spec.n_grid[0]], key=lambda g: (g.d, g.parts))
    header = ["type"] + [str(n) for n in result.spec.n_grid]
    rows = [[str(g)] + [_num(result.mean_bic[n].get(g), ".2f") for n in result.spec.n_grid]
            for g in types]
    return out + "\nmean BIC per type\n" + table(header, rows)
