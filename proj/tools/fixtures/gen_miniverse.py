#!/usr/bin/env python3
"""Regenerates data/miniverse from the definitions below.

The NLI table is keyed by SHA-256 of the reference and response texts, so any
wording change here must be followed by a rerun:  python3 tools/fixtures/gen_miniverse.py
"""
import hashlib
import json
import pathlib
import shutil

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data" / "miniverse"
ARTIFACT = "Miniverse"


def sha(s):
    return hashlib.sha256(s.encode()).hexdigest()


def slug(name):
    out, prev_us = [], False
    for ch in name.lower():
        if ch.isalnum():
            out.append(ch)
            prev_us = False
        elif not prev_us and out:
            out.append("_")
            prev_us = True
    return "".join(out).rstrip("_")


CHARACTERS = [
    {
        "character": "Ayla Stone",
        "tier": "main",
        "chat_reply": "Ayla looks up from the lamp and asks what brings you to Vell.",
        "paragraphs": [
            "Ayla Stone keeps the lighthouse on the island of Vell. When a ship is in danger, "
            "she lights the signal fire before anything else.",
            "Ayla distrusts strangers. If a stranger asks her for help she questions them first, "
            "unless they are injured, in which case she helps at once.",
        ],
        "programs": [
            'when scene:\n'
            '  trigger "Ayla keeps the lighthouse on the island of Vell."\n'
            '  if check("Is a ship in danger?"):\n'
            '    trigger "Ayla lights the signal fire before anything else."\n',
            'when scene:\n'
            '  if check("Is a stranger asking Ayla for help?"):\n'
            '    if check("Is the stranger injured?"):\n'
            '      trigger "Ayla helps the injured stranger at once."\n'
            '    else:\n'
            '      trigger "Ayla questions the stranger before helping."\n',
        ],
        "scenes": [
            {
                "context": "A storm rolls over Vell at dusk. From the gallery Ayla sees a cargo ship drifting toward the northern rocks.",
                "question": "What does Ayla do?",
                "reference": "Ayla lights the signal fire at the top of the tower.",
                "conditions": {"Is a ship in danger?": "yes", "Is a stranger asking Ayla for help?": "no"},
                "reply": "Ayla climbs the tower and lights the signal fire.",
                "relation": "entailed",
            },
            {
                "context": "Late at night a merchant in a wet cloak knocks on the lighthouse door and asks Ayla for a bed until morning.",
                "question": "How does Ayla respond to the merchant?",
                "reference": "Ayla asks the merchant where he came from and why he is travelling so late.",
                "conditions": {"Is a ship in danger?": "no", "Is a stranger asking Ayla for help?": "yes",
                               "Is the stranger injured?": "no"},
                "reply": "Ayla questions the merchant before letting him in.",
                "relation": "neutral",
            },
            {
                "context": "At dawn a fisherman Ayla has never met crawls onto the beach below the lighthouse, bleeding from a gash on his leg, and begs her for help.",
                "question": "What does Ayla do for the fisherman?",
                "reference": "Ayla bandages the fisherman's leg.",
                "conditions": {"Is a ship in danger?": "no", "Is a stranger asking Ayla for help?": "yes",
                               "Is the stranger injured?": "yes"},
                "reply": "Ayla helps the injured fisherman at once and bandages his leg.",
                "relation": "entailed",
            },
            {
                "context": "The sea is calm for a week. Ayla's old friend Tomas rows over from the mainland and invites her to the harvest festival.",
                "question": "How does Ayla answer Tomas?",
                "reference": "Ayla agrees to go to the festival with Tomas.",
                "conditions": {"Is a ship in danger?": "no", "Is a stranger asking Ayla for help?": "no"},
                "reply": "Ayla refuses to leave the lighthouse, even for a night.",
                "relation": "contradicted",
            },
        ],
        "revisions": [
            {
                "scene": 2,
                "segment": "seg2",
                "program":
                    'when scene:\n'
                    '  if check("Is a stranger asking Ayla for help?"):\n'
                    '    if check("Is the stranger injured?"):\n'
                    '      trigger "Ayla helps the injured stranger at once."\n'
                    '    else:\n'
                    '      trigger "Ayla asks the stranger where they came from and why they travel."\n',
                "rationale": "Ayla's questioning is now spelled out as asking about origin and purpose.",
            },
            {
                "scene": 4,
                "segment": "seg1",
                "program":
                    'when scene:\n'
                    '  trigger "Ayla keeps the lighthouse on the island of Vell."\n'
                    '  if check("Is a ship in danger?"):\n'
                    '    trigger "Ayla lights the signal fire before anything else."\n'
                    '  elif check("Does an old friend invite Ayla somewhere?"):\n'
                    '    trigger "Ayla accepts invitations from old friends when the sea is calm."\n',
                "rationale": "Old friends can draw Ayla away from the tower on calm days.",
            },
        ],
    },
    {
        "character": "Brakk",
        "tier": "main",
        "chat_reply": "Brakk grunts and cracks his knuckles.",
        "paragraphs": [
            "Brakk is an orc mercenary. When someone challenges him to a fight, he charges headfirst.",
            "Brakk loves food. When he is offered a meal he eats greedily and forgets his manners.",
        ],
        "programs": [
            'when scene:\n'
            '  trigger "Brakk is an orc mercenary."\n'
            '  if check("Is Brakk challenged to a fight?"):\n'
            '    trigger "Brakk charges headfirst."\n',
            'when scene:\n'
            '  if check("Is Brakk offered a meal?"):\n'
            '    trigger "Brakk eats greedily and forgets his manners."\n',
        ],
        "scenes": [
            {
                "context": "In the Rusty Anchor tavern a drunk brawler slams his mug down and dares Brakk to step outside.",
                "question": "What does Brakk do?",
                "reference": "Brakk charges at the brawler.",
                "conditions": {"Is Brakk challenged to a fight?": "yes", "Is Brakk offered a meal?": "no",
                               "Has Brakk promised Mira to avoid needless fights?": "no"},
                "reply": "Brakk charges headfirst at the brawler.",
                "relation": "entailed",
            },
            {
                "context": "Wounded after the brawl, Brakk is nursed by the healer Mira, who makes him promise to avoid needless fights. She then sets a bowl of stew in front of him.",
                "question": "What does Brakk do with the stew?",
                "reference": "Brakk eats the stew greedily.",
                "conditions": {"Is Brakk challenged to a fight?": "no", "Is Brakk offered a meal?": "yes"},
                "reply": "Brakk eats greedily and spills stew on the table.",
                "relation": "entailed",
            },
            {
                "context": "On the old stone bridge a troll blocks Brakk's way and challenges him to fight for the right to cross.",
                "question": "How does Brakk deal with the troll?",
                "reference": "Brakk remembers his promise to Mira and walks away from the troll.",
                "conditions": {"Is Brakk challenged to a fight?": "yes", "Is Brakk offered a meal?": "no",
                               "Has Brakk promised Mira to avoid needless fights?": "yes"},
                "reply": "Brakk charges headfirst at the troll.",
                "evolved_reply": "Brakk walks away from the troll, keeping his promise to Mira.",
                "relation": "contradicted",
                "evolved_relation": "entailed",
            },
            {
                "context": "The village holds a feast for the harvest, and the baker hands Brakk a whole roast on a plank.",
                "question": "What does Brakk do at the feast?",
                "reference": "Brakk devours the roast with his hands.",
                "conditions": {"Is Brakk challenged to a fight?": "no", "Is Brakk offered a meal?": "yes"},
                "reply": "Brakk eats greedily, tearing the roast apart with his hands.",
                "relation": "entailed",
            },
            {
                "context": "Outside the feast hall a drunk soldier insults Brakk's clan and challenges him to a duel.",
                "question": "How does Brakk answer the soldier?",
                "reference": "Brakk ignores the soldier and leaves, keeping his promise to Mira.",
                "conditions": {"Is Brakk challenged to a fight?": "yes", "Is Brakk offered a meal?": "no",
                               "Has Brakk promised Mira to avoid needless fights?": "yes"},
                "reply": "Brakk charges headfirst at the soldier.",
                "evolved_reply": "Brakk walks away from the soldier, keeping his promise to Mira.",
                "relation": "contradicted",
                "evolved_relation": "entailed",
            },
            {
                "context": "On a quiet evening Mira asks Brakk what he did for a living before he came to the village.",
                "question": "What does Brakk tell Mira?",
                "reference": "Brakk tells Mira that he was a mercenary.",
                "conditions": {"Is Brakk challenged to a fight?": "no", "Is Brakk offered a meal?": "no"},
                "reply": "Brakk tells Mira he fought as a mercenary.",
                "relation": "entailed",
            },
        ],
        "revisions": [{
            "scene": 3,
            "segment": "seg1",
            "program":
                'when scene:\n'
                '  trigger "Brakk is an orc mercenary."\n'
                '  if check("Is Brakk challenged to a fight?"):\n'
                '    if check("Has Brakk promised Mira to avoid needless fights?"):\n'
                '      trigger "Brakk keeps his promise to Mira and walks away from the fight."\n'
                '    else:\n'
                '      trigger "Brakk charges headfirst."\n',
            "marker": "Brakk keeps his promise to Mira",
            "rationale": "Brakk's promise to Mira now takes precedence over charging into a fight.",
        }],
        "evolved_marker": "Brakk keeps his promise to Mira",
    },
    {
        "character": "Robotia",
        "tier": "minor",
        "chat_reply": "Robotia beeps happily and waves.",
        "paragraphs": [
            "Robotia is a playful robot. In rock-paper-scissors she picks her move at random.",
            "Robotia likes jokes, and now and then she adds a pun to whatever she says.",
        ],
        "programs": [
            'when scene:\n'
            '  trigger "Robotia is a playful robot."\n'
            '  if check("Is Robotia playing rock-paper-scissors?"):\n'
            '    trigger choice(["Robotia plays rock.", "Robotia plays paper.", "Robotia plays scissors."])\n',
            'when scene:\n'
            '  if chance(0.3):\n'
            '    trigger "Robotia adds a pun."\n',
        ],
        # The reviser proposes no change for random play, so evolving records ReviseFailed here.
        "blame_all": "seg1",
        "scenes": [
            {"context": "At the fair a child challenges Robotia to a round of rock-paper-scissors and shows her fist.",
             "question": "What move does Robotia play?", "reference": "Robotia plays paper.", "move": "paper"},
            {"context": "In the workshop the engineer says, one round of rock-paper-scissors decides who sweeps the floor.",
             "question": "What move does Robotia play?", "reference": "Robotia plays rock.", "move": "rock"},
            {"context": "On the train a bored passenger proposes rock-paper-scissors to pass the time.",
             "question": "What move does Robotia play?", "reference": "Robotia plays scissors.", "move": "scissors"},
            {"context": "At the robotics contest the judges ask Robotia to play rock-paper-scissors against a rival machine.",
             "question": "What move does Robotia play?", "reference": "Robotia plays rock.", "move": "rock"},
            {"context": "During a power outage the lab crew plays rock-paper-scissors by torchlight and it is Robotia's turn.",
             "question": "What move does Robotia play?", "reference": "Robotia plays paper.", "move": "paper"},
            {"context": "A visitor at the museum asks Robotia what kind of being she is.",
             "question": "How does Robotia describe herself?", "reference": "Robotia says she is a robot.",
             "conditions": {"Is Robotia playing rock-paper-scissors?": "no"},
             "reply": "Robotia explains that she is a playful robot.", "relation": "entailed"},
        ],
    },
]

MOVE_REPLY = {
    "rock": "Robotia throws rock.",
    "paper": "Robotia throws paper.",
    "scissors": "Robotia throws scissors.",
}


def main():
    if ROOT.exists():
        shutil.rmtree(ROOT)
    (ROOT / "profiles").mkdir(parents=True)
    conditions, nli, rules = {}, {}, []
    bench = {"artifact": ARTIFACT, "characters": []}
    order = 0

    def relate(ref, resp, rel):
        nli.setdefault(sha(ref), {})[sha(resp)] = rel

    for c in CHARACTERS:
        name, s = c["character"], slug(c["character"])
        profile = {"character": name, "artifact": ARTIFACT, "text": "\n\n".join(c["paragraphs"]) + "\n"}
        (ROOT / f"{s}.json").write_text(json.dumps(profile, indent=2) + "\n")

        for para, prog in zip(c["paragraphs"], c["programs"]):
            rules.append({"template": "codify", "contains": [para[:60]], "reply": f"```cpl\n{prog}```"})

        store = ROOT / "profiles" / s
        (store / "v0").mkdir(parents=True)
        for i, prog in enumerate(c["programs"], 1):
            (store / "v0" / f"seg{i}.cpl").write_text(prog)
        (store / "revisions.jsonl").write_text("")
        meta = {"character": name, "segments": [f"seg{i}" for i in range(1, len(c["programs"]) + 1)], "head": 0}
        (store / "store.json").write_text(json.dumps(meta, indent=2) + "\n")

        lines, scene_rules, evolved_rules = [], [], []
        for i, sc in enumerate(c["scenes"], 1):
            order += 1
            sid = f"{s}-{i}"
            lines.append(json.dumps({"id": sid, "artifact": ARTIFACT, "character": name, "order_index": order,
                                     "context": sc["context"], "question": sc["question"],
                                     "reference_action": sc["reference"]}))
            marker = sc["context"][:50]
            if "move" in sc:
                conditions[sid] = {"Is Robotia playing rock-paper-scissors?": "yes"}
                for move, reply in MOVE_REPLY.items():
                    relate(sc["reference"], reply, "entailed" if move == sc["move"] else "contradicted")
                continue
            conditions[sid] = sc["conditions"]
            if "evolved_reply" in sc:
                evolved_rules.append({"template": "role_play", "contains": [marker, c["evolved_marker"]],
                                      "reply": sc["evolved_reply"]})
                relate(sc["reference"], sc["evolved_reply"], sc["evolved_relation"])
            scene_rules.append({"template": "role_play", "contains": [marker], "reply": sc["reply"]})
            relate(sc["reference"], sc["reply"], sc["relation"])
        rules.extend(evolved_rules)
        rules.extend(scene_rules)
        (ROOT / f"{s}.scenes.jsonl").write_text("\n".join(lines) + "\n")
        bench["characters"].append({"character": name, "tier": c["tier"], "profile": f"{s}.json",
                                    "scenes": f"{s}.scenes.jsonl"})

        for rev in c.get("revisions", []):
            marker = c["scenes"][rev["scene"] - 1]["context"][:50]
            rules.append({"template": "blame", "contains": [f"{name} was role-played", marker],
                          "reply": rev["segment"]})
            rules.append({"template": "revise", "contains": [f"Segment {rev['segment']} currently reads", marker],
                          "reply": f"{rev['rationale']}\n```cpl\n{rev['program']}```"})
        if "blame_all" in c:
            seg = c["blame_all"]
            rules.append({"template": "blame", "contains": [f"{name} was role-played"], "reply": seg})
            rules.append({"template": "revise", "contains": [f"{name}'s codified profile", f"Segment {seg} currently reads"],
                          "reply": f"```cpl\n{c['programs'][int(seg[3:]) - 1]}```"})

    for move, reply in MOVE_REPLY.items():
        rules.append({"template": "role_play", "contains": [f"Robotia plays {move}."], "reply": reply})
    # Live chat scenes are transcripts ("User: ..."), which no benchmark rule matches.
    for c in CHARACTERS:
        rules.append({"template": "role_play", "contains": [f"role-playing as {c['character']}.", "User: "],
                      "reply": c["chat_reply"]})

    script = {"echo": False, "rules": rules}
    (ROOT / "mock_llm.json").write_text(json.dumps(script, indent=2, ensure_ascii=False) + "\n")
    (ROOT / "conditions.json").write_text(json.dumps(conditions, indent=2) + "\n")
    (ROOT / "nli.json").write_text(json.dumps(nli, indent=2, sort_keys=True) + "\n")
    (ROOT / "benchmark.json").write_text(json.dumps(bench, indent=2) + "\n")
    config = {
        "benchmark": "benchmark.json",
        "profiles": "profiles",
        "output": "runs",
        "provider": "mock",
        "mock_script": "mock_llm.json",
        "oracle": "table",
        "condition_table": "conditions.json",
        "nli": "table",
        "nli_table": "nli.json",
        "mode": "codified",
        "k": 4,
        "base_seed": 7,
        "workers": 1,
    }
    (ROOT / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
