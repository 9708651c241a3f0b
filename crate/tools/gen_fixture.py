#!/usr/bin/env python3
"""Regenerates the bundled 200-utterance fixture corpus.

Usage: python3 tools/gen_fixture.py > crates/core/resources/corpus/fixture.json

The output is deterministic (fixed seed). Dialog acts use lowercase values
while the text carries free-form casing, mirroring MultiWOZ-style corpora.
"""

import json
import random

SEED = 20210801
rng = random.Random(SEED)

PLACES = ["cambridge", "london kings cross", "leicester", "norwich", "ely",
          "stevenage", "birmingham new street", "peterborough",
          "bishops stortford", "stansted airport", "broxbourne", "kings lynn"]
TIMES = ["08:15", "09:30", "10:45", "11:00", "12:15", "13:45", "14:30",
         "15:00", "16:15", "17:45", "18:30", "19:00", "20:45", "21:15",
         "07:05", "06:40"]
DAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
        "sunday"]
PEOPLE = ["1", "2", "3", "4", "5", "6", "7", "8"]
AREAS = ["north", "south", "east", "west", "centre"]
PRICES = ["cheap", "moderate", "expensive"]
STARS = ["2", "3", "4", "5"]
HOTELS = ["acorn guest house", "allenbell", "alexander bed and breakfast",
          "ashley", "cityroomz", "el shaddai", "finches bed and breakfast",
          "gonville", "hamilton lodge", "lovell lodge"]
FOODS = ["italian", "chinese", "indian", "british", "european", "thai",
         "french", "korean", "mexican", "turkish"]
RESTAURANTS = ["pizza hut city centre", "the golden curry", "curry garden",
               "la mimosa", "nandos", "the copper kettle",
               "midsummer house", "saffron brasserie"]
ATTR_TYPES = ["museum", "college", "theatre", "park", "nightclub",
              "architecture", "cinema", "swimming pool"]
ATTRACTIONS = ["kings college", "the fitzwilliam museum",
               "great saint marys church", "all saints church",
               "whale of a time", "the botanic gardens", "clare hall"]

def surface(slot, value):
    """Free-form text rendering of a canonical value."""
    if slot in ("dest", "depart", "name"):
        return " ".join(w.capitalize() if w not in ("of", "a", "and", "the")
                        else w for w in value.split())
    if slot == "day":
        return value.capitalize() if rng.random() < 0.5 else value
    return value


# (domain, intent) -> list of (template, slots). `{slot}` placeholders are
# realized as annotated spans.
FIRST = {
    "train": [
        ("I need a train from {depart} to {dest} on {day}.", ["depart", "dest", "day"]),
        ("Hi, I'm looking for a train that is going to {dest} and arriving there by {arrive}, is there anything like that?", ["dest", "arrive"]),
        ("I am looking for a train leaving {depart} after {leave}.", ["depart", "leave"]),
        ("I want to go to {dest}.", ["dest"]),
        ("Can you help me find a train departing from {depart} on {day}?", ["depart", "day"]),
        ("I'm leaving from {depart} and should arrive in {dest} by {arrive}.", ["depart", "dest", "arrive"]),
    ],
    "hotel": [
        ("I am looking for a place to stay in the {area} with {stars} stars.", ["area", "stars"]),
        ("Can you find me a {price} place to stay?", ["price"]),
        ("I'd like to find information about {name}.", ["name"]),
        ("Hello, I need a {price} place to stay in the {area} of town.", ["price", "area"]),
        ("I'm looking for somewhere to stay called {name}.", ["name"]),
    ],
    "restaurant": [
        ("I want to find a {price} restaurant that serves {food} food.", ["price", "food"]),
        ("Are there any {food} restaurants in the {area}?", ["food", "area"]),
        ("I'm looking for a restaurant called {name}.", ["name"]),
        ("Hi, I would like a {food} place in the {area} of town please.", ["food", "area"]),
    ],
    "attraction": [
        ("I'm looking for a {type} to visit in the {area}.", ["type", "area"]),
        ("Can you tell me about {name}?", ["name"]),
        ("Are there any attractions in the {area} of town?", ["area"]),
        ("I'd like to visit a {type} while I'm in town.", ["type"]),
    ],
    "taxi": [
        ("I need a taxi from {depart} to {dest}.", ["depart", "dest"]),
        ("Please book me a taxi to {dest} leaving after {leave}.", ["dest", "leave"]),
        ("I want a taxi that arrives at {dest} by {arrive}.", ["dest", "arrive"]),
    ],
}

FOLLOW = {
    "train": [
        ("I would like to leave after {leave}.", ["leave"]),
        ("It should arrive by {arrive}.", ["arrive"]),
        ("I'd like to book for {people} people.", ["people"]),
        ("Yes, on {day} please.", ["day"]),
        ("I will be departing from {depart}.", ["depart"]),
        ("Can you book it for {people} people on {day}?", ["people", "day"]),
    ],
    "hotel": [
        ("I need it for {people} people and {stay} nights starting {day}.", ["people", "stay", "day"]),
        ("It should have {stars} stars.", ["stars"]),
        ("Something in the {area} would be great.", ["area"]),
        ("Book it for {stay} nights please.", ["stay"]),
        ("I would prefer a {price} one.", ["price"]),
    ],
    "restaurant": [
        ("Please book a table for {people} at {time} on {day}.", ["people", "time", "day"]),
        ("I would like it to be in the {area}.", ["area"]),
        ("How about {food} food instead?", ["food"]),
        ("A table for {people} people at {time} please.", ["people", "time"]),
    ],
    "attraction": [
        ("What about a {type}?", ["type"]),
        ("Somewhere in the {area} please.", ["area"]),
        ("I think {name} sounds good.", ["name"]),
    ],
    "taxi": [
        ("I want to leave after {leave}.", ["leave"]),
        ("I need to arrive by {arrive}.", ["arrive"]),
        ("It will be picking me up at {depart}.", ["depart"]),
    ],
}

REQUESTS = {
    "train": [
        ("What is the price and the train ID?", ["price", "trainid"]),
        ("How long is the journey?", ["duration"]),
        ("Could you give me the train ID please?", ["trainid"]),
        ("How much does a ticket cost?", ["price"]),
    ],
    "hotel": [
        ("Can I have the phone number and postcode?", ["phone", "postcode"]),
        ("Does it have free parking?", ["parking"]),
        ("What is the address?", ["address"]),
    ],
    "restaurant": [
        ("Could I get the phone number please?", ["phone"]),
        ("What is their address and postcode?", ["address", "postcode"]),
    ],
    "attraction": [
        ("What is the entrance fee?", ["fee"]),
        ("Can I get the address and phone number?", ["address", "phone"]),
    ],
    "taxi": [
        ("What kind of car will it be and what is the contact number?", ["car", "phone"]),
        ("Can I have the contact number?", ["phone"]),
    ],
}

GENERAL = [
    ("Thanks, that is all I need.", [("general", "thank")]),
    ("Thank you very much, goodbye.", [("general", "thank"), ("general", "bye")]),
    ("That's all, thanks for your help.", [("general", "thank")]),
    ("No, that will be it. Bye.", [("general", "bye")]),
]

SYSTEM = [
    "What time would you like to leave?",
    "I have several options for you. Do you have a preference?",
    "Sure, how many people will be in your party?",
    "I can help with that. What day are you looking for?",
    "Booking was successful. Is there anything else I can help with?",
    "Certainly, the reference number is 8LZ2KTQ1.",
    "There are a few matches. Would you like me to book one?",
    "You are welcome. Have a nice day.",
]


def values_for(domain, slot):
    if slot in ("dest", "depart"):
        if domain == "taxi":
            return RESTAURANTS + ATTRACTIONS + HOTELS
        return PLACES
    if slot in ("leave", "arrive", "time"):
        return TIMES
    if slot == "day":
        return DAYS
    if slot == "people":
        return PEOPLE
    if slot == "area":
        return AREAS
    if slot == "price":
        return PRICES
    if slot in ("stars",):
        return STARS
    if slot == "stay":
        return STARS
    if slot == "food":
        return FOODS
    if slot == "type":
        return ATTR_TYPES
    if slot == "name":
        return {"hotel": HOTELS, "restaurant": RESTAURANTS,
                "attraction": ATTRACTIONS}[domain]
    raise KeyError((domain, slot))


# Values used per (domain, slot) in the training split, in first-use order.
# Held-out splits mostly reuse them, as entities in a shared venue database
# recur across the splits of real corpora.
SEEN = {}
REUSE = 0.9


def realize(domain, template, slots, split):
    text = template
    da = []
    spans = []
    chosen = {}
    for slot in slots:
        vals = values_for(domain, slot)
        seen = SEEN.get((domain, slot), [])
        if split != "train" and seen and rng.random() < REUSE:
            vals = seen
        v = rng.choice(vals)
        if slot == "dest" and chosen.get("depart") == v:
            v = rng.choice([x for x in vals if x != v])
        if slot == "depart" and chosen.get("dest") == v:
            v = rng.choice([x for x in vals if x != v])
        chosen[slot] = v
        if split == "train" and v not in seen:
            SEEN.setdefault((domain, slot), []).append(v)
    # fill placeholders left to right so offsets are character-based
    out = ""
    rest = template
    while "{" in rest:
        pre, _, tail = rest.partition("{")
        slot, _, rest = tail.partition("}")
        out += pre
        v = chosen[slot]
        surf = surface(slot, v)
        start = len(out)
        out += surf
        da.append({"domain": domain, "intent": "inform", "slot": slot, "value": v})
        spans.append({"item": len(da) - 1, "start": start, "end": len(out)})
    out += rest
    return {"speaker": "user", "text": out, "da": da, "spans": spans}


def request_turn(domain):
    template, slots = rng.choice(REQUESTS[domain])
    da = [{"domain": domain, "intent": "request", "slot": s, "value": "?"} for s in slots]
    return {"speaker": "user", "text": template, "da": da, "spans": []}


def general_turn():
    template, acts = rng.choice(GENERAL)
    da = [{"domain": d, "intent": i, "slot": "", "value": ""} for d, i in acts]
    return {"speaker": "user", "text": template, "da": da, "spans": []}


def system_turn():
    return {"speaker": "system", "text": rng.choice(SYSTEM), "da": [], "spans": []}


def dialog(idx, split):
    domains = list(FIRST)
    first = rng.choice(domains)
    second = rng.choice([d for d in domains if d != first]) if rng.random() < 0.5 else None
    users = [realize(first, *rng.choice(FIRST[first]), split)]
    follow = lambda d: realize(d, *rng.choice(FOLLOW[d]), split)
    if second is None:
        users.append(realize(first, *rng.choice(FOLLOW[first]), split))
        users.append(rng.choice([request_turn, follow])(first))
    else:
        users.append(rng.choice([request_turn, follow])(first))
        users.append(realize(second, *rng.choice(FIRST[second]), split))
    users.append(general_turn())
    turns = []
    for i, u in enumerate(users):
        turns.append(u)
        if i + 1 < len(users) or rng.random() < 0.5:
            turns.append(system_turn())
    return {"id": f"FX{idx:04d}", "split": split, "turns": turns}


def main():
    dialogs = []
    for i in range(50):
        split = "train" if i < 30 else ("validation" if i < 40 else "test")
        dialogs.append(dialog(i + 1, split))
    print(json.dumps({"dialogs": dialogs}, indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main()
