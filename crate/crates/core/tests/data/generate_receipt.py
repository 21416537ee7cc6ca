"""Writes receipt.xes: 1000 synthetic request-handling cases (fixed seed)."""
import random
from datetime import datetime, timedelta, timezone

random.seed(20190401)
RESOURCES = {
    "register request": ["Pete", "Mike", "Ellen"],
    "examine thoroughly": ["Sue", "Sean"],
    "examine casually": ["Mike", "Sean", "Pete"],
    "check ticket": ["Mike", "Ellen", "Pete"],
    "decide": ["Sara"],
    "reinitiate request": ["Sara"],
    "pay compensation": ["Ellen", "Mike", "Pete"],
    "reject request": ["Pete", "Mike", "Ellen"],
}


def case():
    acts = ["register request"]
    while True:
        examine = random.choice(["examine thoroughly", "examine casually"])
        middle = [examine, "check ticket"]
        random.shuffle(middle)
        acts += middle + ["decide"]
        if len(acts) < 12 and random.random() < 0.25:
            acts.append("reinitiate request")
            continue
        acts.append(random.choice(["pay compensation", "reject request"]))
        return acts


def main():
    start = datetime(2024, 1, 1, 8, 0, tzinfo=timezone.utc)
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<log xes.version="1.0" xes.features="nested-attributes">',
           '  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>',
           '  <extension name="Time" prefix="time" uri="http://www.xes-standard.org/time.xesext"/>',
           '  <extension name="Organizational" prefix="org" uri="http://www.xes-standard.org/org.xesext"/>',
           '  <classifier name="Activity" keys="concept:name"/>',
           '  <string key="concept:name" value="receipt"/>']
    for i in range(1000):
        t = start + timedelta(minutes=37 * i)
        out.append("  <trace>")
        out.append(f'    <string key="concept:name" value="case-{i:04d}"/>')
        for a in case():
            t += timedelta(minutes=random.randint(5, 240))
            out.append("    <event>")
            out.append(f'      <string key="concept:name" value="{a}"/>')
            out.append(f'      <string key="org:resource" value="{random.choice(RESOURCES[a])}"/>')
            out.append(f'      <date key="time:timestamp" value="{t.strftime("%Y-%m-%dT%H:%M:%S.000+00:00")}"/>')
            out.append(f'      <float key="cost" value="{random.choice([50, 100, 200, 400])}.0"/>')
            out.append("    </event>")
        out.append("  </trace>")
    out.append("</log>")
    with open("receipt.xes", "w", encoding="utf-8") as f:
        f.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
