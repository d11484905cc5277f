"""
Scheme files
============

Contexts can be written as small text files. The parser reports problems
with line and column; the renderer writes a canonical form that parses back to
an identical scheme.
"""
# %%
from pairpaths import bundled_scheme_text, evolve, outcome_distribution, parse, render
from pairpaths.dsl import parse_with_diagnostics

text = bundled_scheme_text("scheme_a")
print(text)
scheme = parse(text)
print(outcome_distribution(evolve(scheme)))

# %%
# A tilted variant with one unbalanced splitter, written inline.
custom = parse("""
scheme "tilted" {
  wing minus { splitter 2 intensity 0.3 }
  wing plus { phase cd pi/2 }
  annihilate { (a-, b+) -> R ; (b-, a+) -> S }
}
""")
print(render(custom))
print(outcome_distribution(evolve(custom)))

# %%
# Diagnostics point at the offending token.
_, diags = parse_with_diagnostics("""
scheme "broken" {
  wing minus { splitter 1 ratio 1.4 }
  wing plus = minus
  annihilate { (a-, a+) -> P ; (d-, b+) -> P }
}
""")
for d in diags:
    print(d)
