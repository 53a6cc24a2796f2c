"""Choice rules and stable models.

Three mutually exclusive predicates per element give a program with no
stratification; each stable model picks one of them for every element.
Brave reasoning asks for some model, cautious for all.

Run:  python demos/choices.py
"""

from hodatalog import make_database, query, stable_models, well_founded_model
from hodatalog.analysis import choice_block
from hodatalog.genlib import gen_choice_rules

prog = gen_choice_rules("c", 3)
db = make_database([], constants=["x", "y"])

print("choice predicates:", sorted(choice_block(prog).choice_preds))
wfs = well_founded_model(prog, db)
print("well-founded value of b_c_1(x):", wfs.value("b_c_1", ("x",)))

models = stable_models(prog, db)
print(len(models), "stable models")
for m in models[:3]:
    picks = {c: next(i for i in (1, 2, 3) if m.holds(f"b_c_{i}", (c,))) for c in "xy"}
    print("  ", picks)
print("   ...")

print("brave   b_c_2(x):", query(prog, db, ("b_c_2", ("x",)), mode="brave"))
print("cautious b_c_2(x):", query(prog, db, ("b_c_2", ("x",)), mode="cautious"))
