#!/usr/bin/env python3
"""Builds the toy fixture: dialogues.jsonl, script.json and expected.json.

The script is constructed so that, for every dialogue and every per-type
prompt rendered from the default template, greedy decoding emits exactly the
dialogue's gold relations of that type and every other branch dies without
producing a bracket. Rules are keyed on the minimal context suffix that
uniquely identifies each decision point; the whole plan is verified here by
replaying the generated rules under the mock backend's longest-suffix
semantics before anything is written.

Run from the repository root:  python3 data/toy/generate.py
"""

import json
import os

VERBALISER = {
    "domain_slot": "has slot",
    "slot_value": "has value",
    "value_domain": "has domain",
    "equivalence": "refers to same concept as",
}
TYPES = ["domain_slot", "slot_value", "value_domain", "equivalence"]

DEFINITIONS = {
    "domain_slot": "[term1, has slot, term2]: term1 is a domain and term2 is one of its slots.",
    "slot_value": "[term1, has value, term2]: term1 is a slot and term2 is one of its values.",
    "value_domain": "[term1, has domain, term2]: term1 is a value and term2 is the domain it"
    " belongs to.",
    "equivalence": "[term1, refers to same concept as, term2]: term1 and term2 name the same"
    " concept.",
}

TEMPLATE = (
    "{instruction}\n"
    "\n"
    "Relation formats:\n"
    "{relation_definitions}\n"
    "\n"
    "{exemplar}Dialogue:\n"
    "{dialogue}\n"
    "\n"
    "Terms: {terms}\n"
    "\n"
    "Relations:\n"
)

EOS = "<eos>"
FILLERS = ["alpha", "beta", "gamma", "delta"]  # absorb non-target branch seeds
EOS_CONF = 0.95
SURE_EOS_CONF = 0.9
CONFS = [0.95, 0.85, 0.75, 0.65, 0.55, 0.45, 0.35, 0.25]

DIALOGUES = [
    {
        "id": "toy-01",
        "turns": [["user", "i need a hotel in the centre"],
                  ["system", "the hotel area is set to centre"]],
        "terms": ["hotel", "area", "centre"],
        "gold": [("hotel", "domain_slot", "area"),
                 ("area", "slot_value", "centre"),
                 ("centre", "value_domain", "hotel")],
    },
    {
        "id": "toy-02",
        "turns": [["user", "find me a cheap hotel please"],
                  ["system", "an inexpensive price range it is"]],
        "terms": ["hotel", "price range", "cheap", "inexpensive"],
        "gold": [("hotel", "domain_slot", "price range"),
                 ("price range", "slot_value", "cheap"),
                 ("cheap", "value_domain", "hotel"),
                 ("inexpensive", "equivalence", "cheap")],
    },
    {
        "id": "toy-03",
        "turns": [["user", "does the hotel offer parking"],
                  ["system", "yes parking is available"]],
        "terms": ["hotel", "parking", "yes"],
        "gold": [("hotel", "domain_slot", "parking"),
                 ("parking", "slot_value", "yes")],
    },
    {
        "id": "toy-04",
        "turns": [["user", "book an italian restaurant"],
                  ["system", "the food type is italian then"]],
        "terms": ["restaurant", "food type", "italian"],
        "gold": [("restaurant", "domain_slot", "food type"),
                 ("food type", "slot_value", "italian"),
                 ("italian", "value_domain", "restaurant")],
    },
    {
        "id": "toy-05",
        "turns": [["user", "any restaurant in the north"],
                  ["system", "the north area works"]],
        "terms": ["restaurant", "area", "north"],
        "gold": [("restaurant", "domain_slot", "area"),
                 ("area", "slot_value", "north"),
                 ("north", "value_domain", "restaurant")],
    },
    {
        "id": "toy-06",
        "turns": [["user", "an expensive restaurant please"],
                  ["system", "noted an expensive price range"]],
        "terms": ["restaurant", "price range", "expensive"],
        "gold": [("restaurant", "domain_slot", "price range"),
                 ("price range", "slot_value", "expensive")],
    },
    {
        "id": "toy-07",
        "turns": [["user", "somewhere near the city centre"],
                  ["system", "the centre of town it is"]],
        "terms": ["hotel", "area", "centre", "city centre"],
        "gold": [("hotel", "domain_slot", "area"),
                 ("area", "slot_value", "centre"),
                 ("city centre", "equivalence", "centre")],
    },
    {
        "id": "toy-08",
        "turns": [["user", "i want chinese food"],
                  ["system", "a chinese restaurant then"]],
        "terms": ["restaurant", "food type", "chinese"],
        "gold": [("restaurant", "domain_slot", "food type"),
                 ("food type", "slot_value", "chinese")],
    },
    {
        "id": "toy-09",
        "turns": [["user", "a hotel with a moderate price"],
                  ["system", "a moderate price range then"]],
        "terms": ["hotel", "price range", "moderate"],
        "gold": [("hotel", "domain_slot", "price range"),
                 ("price range", "slot_value", "moderate")],
    },
    {
        "id": "toy-10",
        "turns": [["user", "thanks that is all"],
                  ["system", "happy to help"]],
        "terms": [],
        "gold": None,
    },
]

# toy-09's slot_value prompt mirrors the two-branch scenario: greedy opens
# with a filler word and dies, the rank-2 branch carries the relation.
SWEEP_DIALOGUE = "toy-09"
SWEEP_TYPE = "slot_value"
SWEEP_FIRST = {"sure": 0.5, "[": 0.4}


def instruction_for(ttype):
    verb = VERBALISER[ttype]
    return (
        'List every "%s" relation that holds between the given terms. Write each one as a '
        "bracketed triplet [term, %s, term], using only terms from the term list." % (verb, verb)
    )


def render_dialogue(turns):
    return "\n".join("%s: %s" % (speaker, utterance) for speaker, utterance in turns)


def render_prompt(ttype, dialogue_text, terms):
    values = {
        "instruction": instruction_for(ttype),
        "exemplar": "",
        "dialogue": dialogue_text,
        "terms": "; ".join(terms),
        "relation_definitions": DEFINITIONS[ttype],
    }
    out = TEMPLATE
    for key, value in values.items():
        out = out.replace("{" + key + "}", value, 1)
    return out


def tokenize(text):
    tokens = []
    word = ""
    for c in text:
        if c.isspace():
            if word:
                tokens.append(word)
                word = ""
        elif c in "[],":
            if word:
                tokens.append(word)
                word = ""
            tokens.append(c)
        else:
            word += c
    if word:
        tokens.append(word)
    return tokens


def rel_key(head, ttype, tail):
    if ttype == "equivalence":
        a, b = sorted([head, tail])
        return "%s|%s|%s" % (ttype, a, b)
    return "%s|%s|%s" % (ttype, head, tail)


def bracket_tokens(head, ttype, tail):
    return tokenize("[%s, %s, %s]" % (head, VERBALISER[ttype], tail))


def main():
    out_dir = os.path.dirname(os.path.abspath(__file__))

    # One confidence per unique relation, so its disparity is the same in
    # every dialogue that carries it.
    unique_keys = sorted({rel_key(h, t, tl) for d in DIALOGUES if d["gold"]
                          for h, t, tl in d["gold"]})
    conf = {key: CONFS[i % len(CONFS)] for i, key in enumerate(unique_keys)}

    # Plan every prompt's token stream and collect decision-point states.
    states = {}  # context tuple -> {surface: prob}

    def add_state(ctx, dist):
        if ctx in states:
            assert states[ctx] == dist, "conflicting plan at one context"
        else:
            states[ctx] = dist

    plans = []  # (dialogue, ttype, prompt_tokens, branch0_gen, target_gen)
    for d in DIALOGUES:
        if not d["terms"]:
            continue
        dialogue_text = render_dialogue(d["turns"])
        for ttype in TYPES:
            prompt = tuple(tokenize(render_prompt(ttype, dialogue_text, d["terms"])))
            rels = [r for r in (d["gold"] or []) if r[1] == ttype]
            gen = []
            confs = []
            for h, t, tl in rels:
                toks = bracket_tokens(h, t, tl)
                gen.extend(toks)
                confs.extend([conf[rel_key(h, t, tl)]] * len(toks))
            gen.append(EOS)
            confs.append(EOS_CONF)

            if d["id"] == SWEEP_DIALOGUE and ttype == SWEEP_TYPE:
                assert rels and gen[0] == "["
                add_state(prompt, dict(SWEEP_FIRST))
                add_state(prompt + ("sure",), {EOS: SURE_EOS_CONF})
                ctx = prompt + (gen[0],)
                for tok, c in zip(gen[1:], confs[1:]):
                    add_state(ctx, {tok: c})
                    ctx += (tok,)
                plans.append((d, ttype, prompt, ("sure", EOS), tuple(gen)))
            else:
                ctx = prompt
                for tok, c in zip(gen, confs):
                    add_state(ctx, {tok: c})
                    ctx += (tok,)
                plans.append((d, ttype, prompt, tuple(gen), tuple(gen)))

    # Vocabulary: eos first, then the filler words that soak up branch seeds,
    # then every word the prompts and generations use.
    words = set()
    for ctx in states:
        words.update(ctx)
    for dist in states.values():
        words.update(dist)
    words -= set(FILLERS) | {EOS, "[", ",", "]"}
    listed = [EOS] + FILLERS + sorted(words)
    vocab = listed + ["[", ",", "]"]  # the backend appends the structural tokens
    index = {w: i for i, w in enumerate(vocab)}
    V = len(vocab)

    # Minimal unique suffixes: grow each state's suffix until no state with a
    # different target shares the same context tail. Longest-suffix dispatch
    # then provably picks a rule with the right distribution.
    items = list(states.items())
    rules = {}
    for ctx, dist in items:
        L = 1
        while True:
            suffix = ctx[-L:]
            clash = any(o_ctx[-L:] == suffix and o_dist != dist
                        for o_ctx, o_dist in items if o_ctx is not ctx)
            if not clash:
                break
            L += 1
            assert L <= len(ctx), "cannot disambiguate a decision point"
        suffix = ctx[-L:]
        if suffix in rules:
            assert rules[suffix] == dist
        else:
            rules[suffix] = dist

    # --- verification: replay the rules under mock semantics -------------
    compiled = sorted(rules.items(), key=lambda kv: len(kv[0]))

    def next_probs(context):
        best = None
        for suffix, dist in compiled:
            L = len(suffix)
            if L <= len(context) and context[-L:] == suffix:
                if best is None or L > len(best[0]):
                    best = (suffix, dist)
        probs = {w: 1.0 / V for w in vocab} if best is None else None
        if best is not None:
            probs = {w: 0.0 for w in vocab}
            mass = sum(best[1].values())
            for w, p in best[1].items():
                probs[w] = p
            unlisted = [w for w in vocab if w not in best[1]]
            if unlisted and mass < 1.0 - 1e-12:
                spread = (1.0 - mass) / len(unlisted)
                for w in unlisted:
                    probs[w] = spread
        return probs

    def ranked(probs):
        return sorted(vocab, key=lambda w: (-probs[w], index[w]))

    def greedy(context):
        out = []
        for _ in range(100):
            nxt = ranked(next_probs(context))[0]
            out.append(nxt)
            context = context + (nxt,)
            if nxt == EOS:
                break
        return tuple(out)

    for d, ttype, prompt, branch0, target in plans:
        order = ranked(next_probs(prompt))
        seeds = order[:5]

        def rollout(seed):
            if seed == EOS:
                return (seed,)
            return (seed,) + greedy(prompt + (seed,))

        assert seeds[0] == branch0[0], (d["id"], ttype, seeds, branch0)
        assert rollout(seeds[0]) == branch0, (d["id"], ttype, rollout(seeds[0]), branch0)
        for rank, seed in enumerate(seeds[1:], start=1):
            replay = rollout(seed)
            if d["id"] == SWEEP_DIALOGUE and ttype == SWEEP_TYPE and rank == 1:
                assert seed == "[" and replay == target, (d["id"], replay)
            else:
                assert "[" not in replay, (d["id"], ttype, seed, replay)
                assert len(replay) <= 2, (d["id"], ttype, seed, replay)

    # The constraint engine tokenizes every term and verbaliser up front;
    # each of their words must be a vocabulary entry.
    needed = set()
    for d in DIALOGUES:
        for term in d["terms"]:
            needed.update(tokenize(term))
    for verb in VERBALISER.values():
        needed.update(tokenize(verb))
    assert needed <= set(vocab), needed - set(vocab)

    # --- emit -------------------------------------------------------------
    with open(os.path.join(out_dir, "dialogues.jsonl"), "w") as f:
        for d in DIALOGUES:
            record = {"dialogue_id": d["id"], "turns": d["turns"], "terms": d["terms"]}
            if d["gold"] is not None:
                record["gold_relations"] = [[h, VERBALISER[t], tl] for h, t, tl in d["gold"]]
            f.write(json.dumps(record) + "\n")

    rule_lines = ",\n".join(
        "    " + json.dumps({"suffix": list(suffix), "dist": dist}, sort_keys=True)
        for suffix, dist in sorted(rules.items()))
    with open(os.path.join(out_dir, "script.json"), "w") as f:
        f.write('{\n  "vocab": %s,\n  "rules": [\n%s\n  ]\n}\n'
                % (json.dumps(listed), rule_lines))

    # Raw-mode cross-branch disparity of a relation decoded at confidence c:
    # every component step has p_top = c and p_next = the spread mass.
    def raw_score(c):
        return c - (1.0 - c) / (V - 1)

    provenance = {}
    for d in DIALOGUES:
        for h, t, tl in d["gold"] or []:
            provenance.setdefault(rel_key(h, t, tl), {"triplet": [h, VERBALISER[t], tl],
                                                      "dialogues": []})
            provenance[rel_key(h, t, tl)]["dialogues"].append(d["id"])

    expected = {
        "vocab_size": V,
        "stats": {
            "dialogues": len(DIALOGUES),
            "with_gold": sum(1 for d in DIALOGUES if d["gold"] is not None),
            "gold_instances": sum(len(d["gold"] or []) for d in DIALOGUES),
            "unique_per_type": [
                len({rel_key(h, t, tl) for d in DIALOGUES for h, t, tl in (d["gold"] or [])
                     if t == ttype}) for ttype in TYPES],
            "unique_relations": len(unique_keys),
            "unique_terms": len({term for d in DIALOGUES for term in d["terms"]}
                                | {h for d in DIALOGUES for h, _, _ in (d["gold"] or [])}
                                | {tl for d in DIALOGUES for _, _, tl in (d["gold"] or [])}),
        },
        "gold": {d["id"]: [[h, VERBALISER[t], tl] for h, t, tl in d["gold"]]
                 for d in DIALOGUES if d["gold"] is not None},
        "target_ontology": [provenance[k] for k in sorted(provenance)],
        "relation_scores": [provenance[k]["triplet"] + [raw_score(conf[k])]
                            for k in sorted(provenance)],
        "k1_missing": [list(provenance[rel_key("price range", "slot_value", "moderate")]
                            ["triplet"])],
        "sweep_dialogue": SWEEP_DIALOGUE,
    }
    with open(os.path.join(out_dir, "expected.json"), "w") as f:
        json.dump(expected, f, indent=1, sort_keys=True)
        f.write("\n")

    print("vocab", V, "rules", len(rules), "prompts", len(plans))
    print("longest suffix", max(len(s) for s in rules))


if __name__ == "__main__":
    main()
