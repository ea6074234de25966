#!/usr/bin/env python3
"""Line-for-line transcription of the published VADER reference analyzer
(cjhutto/vaderSentiment 3.3.2, MIT), minus the emoji-description pass.

Used offline to (re)generate tests/fixtures/vader_fixture_200.tsv; the C++
implementation is validated against the frozen fixture, never against this
script at test time.

Run: python3 vader_reference.py <lexicon.txt> <out.tsv>
"""

import math
import string
import sys

B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733
N_SCALAR = -0.74

NEGATE = \
    ["aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
     "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
     "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
     "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
     "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
     "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
     "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
     "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite"]

BOOSTER_DICT = \
    {"absolutely": B_INCR, "amazingly": B_INCR, "awfully": B_INCR,
     "completely": B_INCR, "considerable": B_INCR, "considerably": B_INCR,
     "decidedly": B_INCR, "deeply": B_INCR, "effing": B_INCR, "enormous": B_INCR, "enormously": B_INCR,
     "entirely": B_INCR, "especially": B_INCR, "exceptional": B_INCR, "exceptionally": B_INCR,
     "extreme": B_INCR, "extremely": B_INCR,
     "fabulously": B_INCR, "flipping": B_INCR, "flippin": B_INCR, "frackin": B_INCR, "fracking": B_INCR,
     "fricking": B_INCR, "frickin": B_INCR, "frigging": B_INCR, "friggin": B_INCR, "fully": B_INCR,
     "fuckin": B_INCR, "fucking": B_INCR, "fuggin": B_INCR, "fugging": B_INCR,
     "greatly": B_INCR, "hella": B_INCR, "highly": B_INCR, "hugely": B_INCR,
     "incredible": B_INCR, "incredibly": B_INCR, "intensely": B_INCR,
     "major": B_INCR, "majorly": B_INCR, "more": B_INCR, "most": B_INCR, "particularly": B_INCR,
     "purely": B_INCR, "quite": B_INCR, "really": B_INCR, "remarkably": B_INCR,
     "so": B_INCR, "substantially": B_INCR,
     "thoroughly": B_INCR, "total": B_INCR, "totally": B_INCR, "tremendous": B_INCR, "tremendously": B_INCR,
     "uber": B_INCR, "unbelievably": B_INCR, "unusually": B_INCR, "utter": B_INCR, "utterly": B_INCR,
     "very": B_INCR,
     "almost": B_DECR, "barely": B_DECR, "hardly": B_DECR, "just enough": B_DECR,
     "kind of": B_DECR, "kinda": B_DECR, "kindof": B_DECR, "kind-of": B_DECR,
     "less": B_DECR, "little": B_DECR, "marginal": B_DECR, "marginally": B_DECR,
     "occasional": B_DECR, "occasionally": B_DECR, "partly": B_DECR,
     "scarce": B_DECR, "scarcely": B_DECR, "slight": B_DECR, "slightly": B_DECR, "somewhat": B_DECR,
     "sort of": B_DECR, "sorta": B_DECR, "sortof": B_DECR, "sort-of": B_DECR}

SPECIAL_CASES = {"the shit": 3, "the bomb": 3, "bad ass": 1.5, "badass": 1.5, "bus stop": 0.0,
                 "yeah right": -2, "kiss of death": -1.5, "to die for": 3,
                 "beating heart": 3.1, "broken heart": -2.9}


def negated(input_words, include_nt=True):
    input_words = [str(w).lower() for w in input_words]
    for word in NEGATE:
        if word in input_words:
            return True
    if include_nt:
        for word in input_words:
            if "n't" in word:
                return True
    return False


def normalize(score, alpha=15):
    norm_score = score / math.sqrt((score * score) + alpha)
    if norm_score < -1.0:
        return -1.0
    elif norm_score > 1.0:
        return 1.0
    else:
        return norm_score


def allcap_differential(words):
    allcap_words = 0
    for word in words:
        if word.isupper():
            allcap_words += 1
    cap_differential = len(words) - allcap_words
    return 0 < cap_differential < len(words)


def scalar_inc_dec(word, valence, is_cap_diff):
    scalar = 0.0
    word_lower = word.lower()
    if word_lower in BOOSTER_DICT:
        scalar = BOOSTER_DICT[word_lower]
        if valence < 0:
            scalar *= -1
        if word.isupper() and is_cap_diff:
            if valence > 0:
                scalar += C_INCR
            else:
                scalar -= C_INCR
    return scalar


class SentiText:
    def __init__(self, text):
        self.text = text
        self.words_and_emoticons = self._words_and_emoticons()
        self.is_cap_diff = allcap_differential(self.words_and_emoticons)

    @staticmethod
    def _strip_punc_if_word(token):
        stripped = token.strip(string.punctuation)
        if len(stripped) <= 2:
            return token
        return stripped

    def _words_and_emoticons(self):
        wes = self.text.split()
        return list(map(self._strip_punc_if_word, wes))


class SentimentIntensityAnalyzer:
    def __init__(self, lexicon_path):
        self.lexicon = {}
        with open(lexicon_path, encoding="utf-8") as f:
            for line in f.read().rstrip("\n").split("\n"):
                if not line.strip():
                    continue
                (word, measure) = line.strip().split("\t")[0:2]
                self.lexicon[word] = float(measure)

    def polarity_scores(self, text):
        sentitext = SentiText(text)
        sentiments = []
        words_and_emoticons = sentitext.words_and_emoticons
        for i, item in enumerate(words_and_emoticons):
            valence = 0
            if item.lower() in BOOSTER_DICT:
                sentiments.append(valence)
                continue
            if (i < len(words_and_emoticons) - 1 and item.lower() == "kind" and
                    words_and_emoticons[i + 1].lower() == "of"):
                sentiments.append(valence)
                continue
            sentiments = self.sentiment_valence(valence, sentitext, item, i, sentiments)
        sentiments = self._but_check(words_and_emoticons, sentiments)
        return self.score_valence(sentiments, text)

    def sentiment_valence(self, valence, sentitext, item, i, sentiments):
        is_cap_diff = sentitext.is_cap_diff
        words_and_emoticons = sentitext.words_and_emoticons
        item_lowercase = item.lower()
        if item_lowercase in self.lexicon:
            valence = self.lexicon[item_lowercase]

            if item_lowercase == "no" and i != len(words_and_emoticons) - 1 \
                    and words_and_emoticons[i + 1].lower() in self.lexicon:
                valence = 0.0
            if (i > 0 and words_and_emoticons[i - 1].lower() == "no") \
                    or (i > 1 and words_and_emoticons[i - 2].lower() == "no") \
                    or (i > 2 and words_and_emoticons[i - 3].lower() == "no"
                        and words_and_emoticons[i - 1].lower() in ["or", "nor"]):
                valence = self.lexicon[item_lowercase] * N_SCALAR

            if item.isupper() and is_cap_diff:
                if valence > 0:
                    valence += C_INCR
                else:
                    valence -= C_INCR

            for start_i in range(0, 3):
                if i > start_i and words_and_emoticons[i - (start_i + 1)].lower() not in self.lexicon:
                    s = scalar_inc_dec(words_and_emoticons[i - (start_i + 1)], valence, is_cap_diff)
                    if start_i == 1 and s != 0:
                        s = s * 0.95
                    if start_i == 2 and s != 0:
                        s = s * 0.9
                    valence = valence + s
                    valence = self._negation_check(valence, words_and_emoticons, start_i, i)
                    if start_i == 2:
                        valence = self._special_idioms_check(valence, words_and_emoticons, i)

            valence = self._least_check(valence, words_and_emoticons, i)
        sentiments.append(valence)
        return sentiments

    def _least_check(self, valence, words_and_emoticons, i):
        if i > 1 and words_and_emoticons[i - 1].lower() not in self.lexicon \
                and words_and_emoticons[i - 1].lower() == "least":
            if words_and_emoticons[i - 2].lower() != "at" and words_and_emoticons[i - 2].lower() != "very":
                valence = valence * N_SCALAR
        elif i > 0 and words_and_emoticons[i - 1].lower() not in self.lexicon \
                and words_and_emoticons[i - 1].lower() == "least":
            valence = valence * N_SCALAR
        return valence

    @staticmethod
    def _but_check(words_and_emoticons, sentiments):
        words_and_emoticons_lower = [str(w).lower() for w in words_and_emoticons]
        if 'but' in words_and_emoticons_lower:
            bi = words_and_emoticons_lower.index('but')
            for sentiment in sentiments:
                si = sentiments.index(sentiment)
                if si < bi:
                    sentiments.pop(si)
                    sentiments.insert(si, sentiment * 0.5)
                elif si > bi:
                    sentiments.pop(si)
                    sentiments.insert(si, sentiment * 1.5)
        return sentiments

    @staticmethod
    def _special_idioms_check(valence, words_and_emoticons, i):
        words_and_emoticons_lower = [str(w).lower() for w in words_and_emoticons]
        onezero = "{0} {1}".format(words_and_emoticons_lower[i - 1], words_and_emoticons_lower[i])
        twoonezero = "{0} {1} {2}".format(words_and_emoticons_lower[i - 2],
                                          words_and_emoticons_lower[i - 1], words_and_emoticons_lower[i])
        twoone = "{0} {1}".format(words_and_emoticons_lower[i - 2], words_and_emoticons_lower[i - 1])
        threetwoone = "{0} {1} {2}".format(words_and_emoticons_lower[i - 3],
                                           words_and_emoticons_lower[i - 2], words_and_emoticons_lower[i - 1])
        threetwo = "{0} {1}".format(words_and_emoticons_lower[i - 3], words_and_emoticons_lower[i - 2])

        sequences = [onezero, twoonezero, twoone, threetwoone, threetwo]
        for seq in sequences:
            if seq in SPECIAL_CASES:
                valence = SPECIAL_CASES[seq]
                break

        if len(words_and_emoticons_lower) - 1 > i:
            zeroone = "{0} {1}".format(words_and_emoticons_lower[i], words_and_emoticons_lower[i + 1])
            if zeroone in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroone]
        if len(words_and_emoticons_lower) - 1 > i + 1:
            zeroonetwo = "{0} {1} {2}".format(words_and_emoticons_lower[i], words_and_emoticons_lower[i + 1],
                                              words_and_emoticons_lower[i + 2])
            if zeroonetwo in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroonetwo]

        n_grams = [threetwoone, threetwo, twoone]
        for n_gram in n_grams:
            if n_gram in BOOSTER_DICT:
                valence = valence + BOOSTER_DICT[n_gram]
        return valence

    @staticmethod
    def _negation_check(valence, words_and_emoticons, start_i, i):
        words_and_emoticons_lower = [str(w).lower() for w in words_and_emoticons]
        if start_i == 0:
            if negated([words_and_emoticons_lower[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        if start_i == 1:
            if words_and_emoticons_lower[i - 2] == "never" and \
                    (words_and_emoticons_lower[i - 1] == "so" or
                     words_and_emoticons_lower[i - 1] == "this"):
                valence = valence * 1.25
            elif words_and_emoticons_lower[i - 2] == "without" and \
                    words_and_emoticons_lower[i - 1] == "doubt":
                valence = valence
            elif negated([words_and_emoticons_lower[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        if start_i == 2:
            if words_and_emoticons_lower[i - 3] == "never" and \
                    (words_and_emoticons_lower[i - 2] == "so" or words_and_emoticons_lower[i - 2] == "this") or \
                    (words_and_emoticons_lower[i - 1] == "so" or words_and_emoticons_lower[i - 1] == "this"):
                valence = valence * 1.25
            elif words_and_emoticons_lower[i - 3] == "without" and \
                    (words_and_emoticons_lower[i - 2] == "doubt" or words_and_emoticons_lower[i - 1] == "doubt"):
                valence = valence
            elif negated([words_and_emoticons_lower[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        return valence

    def _punctuation_emphasis(self, text):
        return self._amplify_ep(text) + self._amplify_qm(text)

    @staticmethod
    def _amplify_ep(text):
        ep_count = text.count("!")
        if ep_count > 4:
            ep_count = 4
        return ep_count * 0.292

    @staticmethod
    def _amplify_qm(text):
        qm_count = text.count("?")
        if qm_count > 1:
            if qm_count <= 3:
                return qm_count * 0.18
            return 0.96
        return 0.0

    @staticmethod
    def _sift_sentiment_scores(sentiments):
        pos_sum = 0.0
        neg_sum = 0.0
        neu_count = 0
        for sentiment_score in sentiments:
            if sentiment_score > 0:
                pos_sum += (float(sentiment_score) + 1)
            if sentiment_score < 0:
                neg_sum += (float(sentiment_score) - 1)
            if sentiment_score == 0:
                neu_count += 1
        return pos_sum, neg_sum, neu_count

    def score_valence(self, sentiments, text):
        if sentiments:
            sum_s = float(sum(sentiments))
            punct_emph_amplifier = self._punctuation_emphasis(text)
            if sum_s > 0:
                sum_s += punct_emph_amplifier
            elif sum_s < 0:
                sum_s -= punct_emph_amplifier
            compound = normalize(sum_s)
            pos_sum, neg_sum, neu_count = self._sift_sentiment_scores(sentiments)
            if pos_sum > math.fabs(neg_sum):
                pos_sum += punct_emph_amplifier
            elif pos_sum < math.fabs(neg_sum):
                neg_sum -= punct_emph_amplifier
            total = pos_sum + math.fabs(neg_sum) + neu_count
            pos = math.fabs(pos_sum / total)
            neg = math.fabs(neg_sum / total)
            neu = math.fabs(neu_count / total)
        else:
            compound = 0.0
            pos = 0.0
            neg = 0.0
            neu = 0.0
        return {"neg": round(neg, 3), "neu": round(neu, 3),
                "pos": round(pos, 3), "compound": round(compound, 4)}


# Published ground-truth outputs of the reference analyzer; a transcription
# drift would show up here before any fixture is written.
KNOWN = [
    ("VADER is smart, handsome, and funny.", 0.8316),
    ("VADER is smart, handsome, and funny!", 0.8439),
    ("VADER is very smart, handsome, and funny.", 0.8545),
    ("VADER is VERY SMART, handsome, and FUNNY.", 0.9227),
    ("VADER is VERY SMART, handsome, and FUNNY!!!", 0.9342),
    ("VADER is VERY SMART, uber handsome, and FRIGGIN FUNNY!!!", 0.9469),
    ("VADER is not smart, handsome, nor funny.", -0.7424),
    ("The book was good.", 0.4404),
    ("At least it isn't a horrible book.", 0.431),
    ("The book was only kind of good.", 0.3832),
    ("The plot was good, but the characters are uncompelling and the dialog is not great.", -0.7042),
    ("Today SUX!", -0.5461),
    ("Make sure you :) or :D today!", 0.8633),
    ("Not bad at all", 0.431),
]


def main():
    lexicon_path = sys.argv[1]
    out_path = sys.argv[2] if len(sys.argv) > 2 else None
    analyzer = SentimentIntensityAnalyzer(lexicon_path)

    ok = True
    for text, expected in KNOWN:
        got = analyzer.polarity_scores(text)["compound"]
        status = "ok" if abs(got - expected) < 5e-5 else "MISMATCH"
        if status == "MISMATCH":
            ok = False
        print(f"{status}  {got: .4f}  (want {expected: .4f})  {text}")
    if not ok:
        sys.exit("transcription drift detected; refusing to write fixture")

    if out_path:
        sentences = build_sentences()
        with open(out_path, "w", encoding="utf-8") as out:
            for s in sentences:
                c = analyzer.polarity_scores(s)["compound"]
                out.write(f"{c}\t{s}\n")
        print(f"wrote {len(sentences)} sentences -> {out_path}")


def build_sentences():
    subjects = ["the park", "this movie", "our team", "the weather", "my neighbor",
                "the new policy", "that restaurant", "the meeting", "her idea", "his plan"]
    positives = ["great", "good", "wonderful", "amazing", "nice", "lovely", "brilliant", "happy", "fantastic", "superb"]
    negatives = ["bad", "terrible", "awful", "horrible", "disappointing", "sad", "boring", "ugly", "annoying", "dreadful"]
    boosters = ["very", "really", "extremely", "somewhat", "hardly", "barely", "incredibly", "slightly", "so", "totally"]

    out = []
    for i in range(10):
        out.append(f"I think {subjects[i]} is {positives[i]}.")
        out.append(f"I think {subjects[i]} is {negatives[i]}.")
        out.append(f"{subjects[i]} is {boosters[i]} {positives[(i + 3) % 10]}.")
        out.append(f"{subjects[i]} is {boosters[(i + 5) % 10]} {negatives[(i + 7) % 10]}!")
        out.append(f"{subjects[i]} is not {positives[(i + 1) % 10]}.")
        out.append(f"I don't think {subjects[i]} is {negatives[(i + 2) % 10]}.")
        out.append(f"{subjects[i]} was good, but the ending was {negatives[(i + 4) % 10]}.")
        out.append(f"Was {subjects[i]} {positives[(i + 6) % 10]}?? Maybe not??")
    for i in range(10):
        out.append(f"At least {subjects[i]} isn't {negatives[(i + 1) % 10]}.")
        out.append(f"{subjects[i].upper()} IS {positives[(i + 2) % 10].upper()} today!!!")
        out.append(f"never so {positives[(i + 4) % 10]}, without doubt {negatives[(i + 5) % 10]}")
        out.append(f"this is kind of {positives[(i + 8) % 10]}, sort of {negatives[(i + 8) % 10]}")
        out.append(f"I agree with you about {subjects[i]}, it sounds {positives[(i + 5) % 10]} to me.")
        out.append(f"I disagree, {subjects[i]} seemed {negatives[(i + 3) % 10]} and {negatives[(i + 6) % 10]}.")
        out.append(f"honestly {subjects[i]} was never {positives[(i + 9) % 10]}")
        out.append(f"wasn't {subjects[i]} just {boosters[(i + 2) % 10]} {positives[(i + 7) % 10]}?")
        out.append(f"{positives[i]} start, {negatives[(i + 1) % 10]} finish, but {positives[(i + 2) % 10]} overall")
        out.append(f"no {positives[(i + 3) % 10]} deed goes unpunished, no {negatives[(i + 9) % 10]} one either")
    out += [
        "Stay silent",
        "ok",
        "The quarterly report arrives on Tuesday.",
        "Water boils at one hundred degrees.",
        "no good no bad no nothing",
        "no fun or no prospect",
        "yeah right, that was the bomb",
        "that concert was the shit",
        "he is a badass with a beating heart",
        "it was the kiss of death for the project, to die for",
        "uh-uh, I won't accept that, nope",
        "rarely seldom despite everything, we smiled",
        "I LOVE it here, lol :)",
        "this sux :( and I hate it",
        "amazing!!!! simply amazing!!!!!",
        "good good good good bad",
        "but good",
        "good but",
        "at least it was good, at the very least okay",
        "the very least happy outcome",
    ]
    assert len(out) == 200, len(out)
    return out


if __name__ == "__main__":
    main()
