"""Equational rewriting: sound laws, static expansion, and normal forms.

Every rewrite step names a law, a position and a direction, so proofs
replay mechanically.  The prover compares normal forms and falls back to
the decision procedure to surface any completeness gap of the strategy.
"""

from mpcalc.axioms import (RewriteStep, apply_law, axiom_prove, expand_static,
                           normalize, normalize_with_trace)
from mpcalc.parser import parse_term

# A single law application at the root.
term = parse_term("<a,1>.0 + <b,2>.0")
print(term, " -> ", apply_law(term, RewriteStep("A1")), " (commutativity)")

# Merging equal-continuation branches keeps rate sums per name intact:
# the merged head carries 1+2 and the continuations are scaled 1/3, 2/3.
figure = parse_term("<a,1>.<b,5>.0 + <a,2>.<b,5>.0")
print(figure, " -> ", apply_law(figure, RewriteStep("A4")))
print()

# Static operators expand away: synchronization distributes the
# generative rate over the passive weights.
composed = parse_term("(<a,2>.0) |[a]| (<a,*3>.0 + <a,*1>.0)")
print(composed, " -> ", expand_static(composed))
hidden = parse_term("((<a,1>.0 + <b,2>.0) / {a})[b->c]")
print(hidden, " -> ", expand_static(hidden))
print()

# Normal forms are sorted, nil-free, maximally merged sums.
messy = parse_term("((<a,2>.0) |[a]| (<a,*3>.0 + <a,*1>.0)) + 0")
normal, steps = normalize_with_trace(messy)
print("normalize", messy)
for step in steps:
    print("  ", step)
print("  =", normal)
print()

# Proof = identical normal forms.  Inequivalent terms stay apart.
report = axiom_prove(parse_term("<a,1>.<b,2>.0 + <a,3>.<b,2>.0"),
                     parse_term("<a,4>.<b,2>.0"))
print("merged branches proved:", report.proved)
report = axiom_prove(parse_term("<tau,2>.0"), parse_term("<tau,1>.0"))
print("different speeds proved:", report.proved,
      " decider agrees they differ:", report.decider_equivalent is False)
print("idempotent:", normalize(normalize(messy)) == normalize(messy))
