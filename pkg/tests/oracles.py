"""Brute-force reference implementations of the naive and fair selection rules.

Written from the algorithm descriptions without importing grvbroker.selection,
so the comparison in the tests is between two independent code paths.
"""


class NaiveOracle:
    def __init__(self, t_res):
        self.t_res = t_res
        self.t_last = None
        self.j = 0
        self.last_list = None

    def choose(self, roster, req_grv, excluded, now):
        # roster: list of (id, grv)
        cands = [(pid, g) for pid, g in roster if g >= req_grv and pid not in excluded]
        # descending GRV, ascending id among equals: plain insertion sort
        ordered = []
        for c in cands:
            i = 0
            while i < len(ordered) and (ordered[i][1] > c[1] or (ordered[i][1] == c[1] and ordered[i][0] < c[0])):
                i += 1
            ordered.insert(i, c)
        if not ordered:
            self.t_last = now
            top = None
            for pid, g in roster:
                if top is None or g > top[1] or (g == top[1] and pid < top[0]):
                    top = (pid, g)
            return top[0], True
        names = [pid for pid, _ in ordered]
        if names != self.last_list:
            self.last_list = names
            self.j = 0
        quiet = self.t_last is None or (now - self.t_last) > self.t_res
        self.t_last = now
        if quiet:
            self.j = 0
            return ordered[0][0], False
        nxt = self.j + 1
        if nxt < len(ordered) and ordered[nxt][1] >= req_grv:
            self.j = nxt
        else:
            self.j = 0
        return ordered[self.j][0], False


class FairOracle:
    def __init__(self):
        self.counts = {}

    def choose(self, roster, class_mins, req_grv, excluded):
        """Return (chosen id, its z, fallback flag) and record the provision."""
        qualified = [(pid, g) for pid, g in roster if g >= req_grv and pid not in excluded]
        if not qualified:
            top = None
            for pid, g in roster:
                if top is None or g > top[1] or (g == top[1] and pid < top[0]):
                    top = (pid, g)
            self.counts[top[0]] = self.counts.get(top[0], 0) + 1
            return top[0], None, True
        levels = [t for t in class_mins if t >= req_grv]
        if not levels or min(levels) > req_grv:
            levels = [req_grv] + levels
        phi = [[pid for pid, g in qualified if g >= t] for t in levels]
        denom = len([1 for _, g in roster if g >= req_grv])
        total = sum(self.counts.values())
        best = None
        for pid, g in qualified:
            num = 0.0
            for members in phi:
                if pid in members:
                    num += 1.0 / len(members)
            pr = num / denom
            z = 0.0 if total == 0 else pr * self.counts.get(pid, 0) / total
            key = (z, -g, pid)
            if best is None or key < best[0]:
                best = (key, pid, z)
        pid = best[1]
        self.counts[pid] = self.counts.get(pid, 0) + 1
        return pid, best[2], False
