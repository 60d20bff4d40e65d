"""
Which channels make every output a product?
===========================================

Forms iii and iv fix one marginal, so even entangled inputs come out as
products. Local channels and flips generally pass entanglement through.
"""

# %%
from prodchan import channels as chn
from prodchan import classifier as cl
from prodchan import corpus, states

# %%
for form in ("i", "ii", "iii", "iv"):
    ch = corpus.generate(form, 2, 2, seed=1).channel
    report = cl.check_proposition1(ch, n=500, seed=0)
    print(f"form {form:3s} worst output product distance over 500 states: {report.max_violation:.2e}")

# %%
# The identity is local, and keeps the Bell state entangled.
out = chn.apply(chn.identity_channel(4, (2, 2)), states.bell_state())
print("identity on Bell:", states.product_distance(out))
