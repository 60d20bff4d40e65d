"""
Classifying channels
====================

classify() rebuilds the four candidate forms from the images of an
informationally complete family of product probes and keeps those whose
Choi matrix matches. If none does, it returns a product input whose image is
correlated.
"""

# %%
from prodchan import channels as chn
from prodchan import classifier as cl
from prodchan import corpus, states


def show(name, ch):
    result = cl.classify(ch, seed=0)
    if result.preserving:
        fits = ", ".join(f"{f.form} ({f.residual:.1e})" for f in result.forms)
        print(f"{name:24s} preserving; forms {fits}")
    else:
        print(f"{name:24s} NOT preserving; witness output distance {result.witness_violation:.6f}")
    return result


# %%
show("damping (x) depolarizing", chn.tensor_channel(
    corpus.noise_zoo("amplitude_damping", 2, 0.3), corpus.noise_zoo("depolarizing", 2, 0.5)))
show("swap", chn.flip_channel(chn.identity_channel(2), chn.identity_channel(2)))

# %%
# A channel that always outputs sigma (x) tau fits several forms at once.
omega = states.product_state(states.random_density(2, 2, 0), states.random_density(2, 2, 1))
show("contractive", chn.contractive_channel(omega, 4).with_splits((2, 2), (2, 2)))

# %%
# CNOT turns |+>|0> into a Bell state.
result = show("CNOT", corpus.cnot_channel())
print(result.witness.mat.real)

# %%
# The Monte Carlo oracle agrees, without using the classifier.
print("oracle on CNOT:", cl.verify_preservation(corpus.cnot_channel(), n=1000, seed=0).max_violation)
for form in ("i", "ii", "iii", "iv"):
    entry = corpus.generate(form, 2, 3, seed=3)
    show(f"generated form {form}", entry.channel)
