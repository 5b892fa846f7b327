// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "defr/error.hpp"
#include "defr/labelspace.hpp"
#include "doctest.h"

using namespace defr;

TEST_CASE("parse_class_list assigns indices in file order") {
  auto classes = parse_class_list("ride bicycle\ncut carrot\n");
  REQUIRE(classes.size() == 2);
  CHECK(classes[0] == HoiLabel{"ride", "bicycle", 0});
  CHECK(classes[1] == HoiLabel{"cut", "carrot", 1});
}

TEST_CASE("parse_class_list tolerates a missing final newline and extra spaces") {
  auto classes = parse_class_list("hop_on  bicycle\r\n  sit_at dining_table");
  REQUIRE(classes.size() == 2);
  CHECK(classes[1].verb == "sit_at");
  CHECK(classes[1].object == "dining_table");
}

TEST_CASE("parse_class_list errors") {
  CHECK_THROWS_AS(parse_class_list(""), ParseError);
  try {
    parse_class_list("ride bicycle\nride a bicycle\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_class_list("ride bicycle\n\ncut carrot\n"), ParseError);
  CHECK_THROWS_AS(parse_class_list("ride bicycle\ncut carrot\nride bicycle\n"), DuplicateError);
}

TEST_CASE("a 600-line vocabulary parses to 600 classes") {
  // 120 verbs x 5 objects stands in for the 600-class vocabulary.
  std::string doc;
  for (int v = 0; v < 120; ++v) {
    for (const char* o : {"bicycle", "horse", "dining_table", "kite", "apple"}) {
      doc += "verb" + std::to_string(v) + " " + o + "\n";
    }
  }
  auto classes = parse_class_list(doc);
  CHECK(classes.size() == 600);
  CHECK(classes[599].index == 599);
  CHECK(make_prompts(classes).size() == 600);
}

TEST_CASE("gerundize rule cascade") {
  CHECK(gerundize("ride") == "riding");
  CHECK(gerundize("cut") == "cutting");
  CHECK(gerundize("hop_on") == "hopping on");
  CHECK(gerundize("lie") == "lying");
  CHECK(gerundize("lie_on") == "lying on");
  CHECK(gerundize("see") == "seeing");
  CHECK(gerundize("be") == "being");
  CHECK(gerundize("type") == "typing");
  CHECK(gerundize("blow") == "blowing");
  CHECK(gerundize("fix") == "fixing");
  CHECK(gerundize("exit") == "exiting");
  CHECK(gerundize("open") == "opening");
  CHECK(gerundize("control") == "controlling");
}

TEST_CASE("gerundize with a custom exception table") {
  GerundTable table{{"ride", "riiding"}};
  CHECK(gerundize("ride", table) == "riiding");
  CHECK(gerundize("lie", table) == "liing");  // suffix rules alone misfire
  auto parsed = parse_gerund_table("# comment\nlie lying   # trailing\n\n");
  CHECK(parsed.at("lie") == "lying");
  CHECK_THROWS_AS(parse_gerund_table("lie\n"), ParseError);
}

TEST_CASE("gerunds for the 117 HICO verbs") {
  // Hand-checked present participles.
  const std::vector<std::pair<const char*, const char*>> expected = {
      {"adjust", "adjusting"}, {"assemble", "assembling"}, {"block", "blocking"},
      {"blow", "blowing"}, {"board", "boarding"}, {"break", "breaking"},
      {"brush_with", "brushing with"}, {"buy", "buying"}, {"carry", "carrying"},
      {"catch", "catching"}, {"chase", "chasing"}, {"check", "checking"},
      {"clean", "cleaning"}, {"control", "controlling"}, {"cook", "cooking"},
      {"cut", "cutting"}, {"cut_with", "cutting with"}, {"direct", "directing"},
      {"drag", "dragging"}, {"dribble", "dribbling"}, {"drink_with", "drinking with"},
      {"drive", "driving"}, {"dry", "drying"}, {"eat", "eating"}, {"eat_at", "eating at"},
      {"exit", "exiting"}, {"feed", "feeding"}, {"fill", "filling"}, {"flip", "flipping"},
      {"flush", "flushing"}, {"fly", "flying"}, {"greet", "greeting"}, {"grind", "grinding"},
      {"groom", "grooming"}, {"herd", "herding"}, {"hit", "hitting"}, {"hold", "holding"},
      {"hop_on", "hopping on"}, {"hose", "hosing"}, {"hug", "hugging"}, {"hunt", "hunting"},
      {"inspect", "inspecting"}, {"install", "installing"}, {"jump", "jumping"},
      {"kick", "kicking"}, {"kiss", "kissing"}, {"lasso", "lassoing"},
      {"launch", "launching"}, {"lick", "licking"}, {"lie_on", "lying on"},
      {"lift", "lifting"}, {"light", "lighting"}, {"load", "loading"}, {"lose", "losing"},
      {"make", "making"}, {"milk", "milking"}, {"move", "moving"}, {"open", "opening"},
      {"operate", "operating"}, {"pack", "packing"}, {"paint", "painting"},
      {"park", "parking"}, {"pay", "paying"}, {"peel", "peeling"}, {"pet", "petting"},
      {"pick", "picking"}, {"pick_up", "picking up"}, {"point", "pointing"},
      {"pour", "pouring"}, {"pull", "pulling"}, {"push", "pushing"}, {"race", "racing"},
      {"read", "reading"}, {"release", "releasing"}, {"repair", "repairing"},
      {"ride", "riding"}, {"row", "rowing"}, {"run", "running"}, {"sail", "sailing"},
      {"scratch", "scratching"}, {"serve", "serving"}, {"set", "setting"},
      {"shear", "shearing"}, {"sign", "signing"}, {"sip", "sipping"},
      {"sit_at", "sitting at"}, {"sit_on", "sitting on"}, {"slide", "sliding"},
      {"smell", "smelling"}, {"spin", "spinning"}, {"squeeze", "squeezing"},
      {"stab", "stabbing"}, {"stand_on", "standing on"}, {"stand_under", "standing under"},
      {"stick", "sticking"}, {"stir", "stirring"}, {"stop_at", "stopping at"},
      {"straddle", "straddling"}, {"swing", "swinging"}, {"tag", "tagging"},
      {"talk_on", "talking on"}, {"teach", "teaching"}, {"text_on", "texting on"},
      {"throw", "throwing"}, {"tie", "tying"}, {"toast", "toasting"}, {"train", "training"},
      {"turn", "turning"}, {"type_on", "typing on"}, {"walk", "walking"}, {"wash", "washing"},
      {"watch", "watching"}, {"wave", "waving"}, {"wear", "wearing"}, {"wield", "wielding"},
      {"zip", "zipping"},
  };
  // no_interaction is the 117th verb; it never goes through gerundize.
  CHECK(expected.size() + 1 == 117);
  for (const auto& [verb, gerund] : expected) {
    CAPTURE(verb);
    CHECK(gerundize(verb) == gerund);
  }
}

TEST_CASE("make_prompt template") {
  CHECK(make_prompt({"ride", "bicycle", 0}).text == "a person riding a bicycle");
  CHECK(make_prompt({"eat", "apple", 0}).text == "a person eating an apple");
  CHECK(make_prompt({"no_interaction", "bicycle", 0}).text == "a person and a bicycle");
  CHECK(make_prompt({"no_interaction", "umbrella", 0}).text == "a person and an umbrella");
  CHECK(make_prompt({"sit_at", "dining_table", 0}).text == "a person sitting at a dining table");
  CHECK(make_prompt({"hop_on", "elephant", 3}).source.index == 3);
}

TEST_CASE("prompts preserve order and contain their object") {
  auto classes = parse_class_list(
      "ride bicycle\nno_interaction orange\nsit_at dining_table\nlie_on couch\nwave kite\n");
  auto prompts = make_prompts(classes);
  REQUIRE(prompts.size() == classes.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    CHECK(prompts[i].source.index == i);
    std::string object = classes[i].object;
    std::replace(object.begin(), object.end(), '_', ' ');
    CHECK(prompts[i].text.find(object) != std::string::npos);
    CHECK(make_prompt(classes[i]).text == prompts[i].text);
  }
}

TEST_CASE("builtin table is loaded from the shipped data file") {
  const auto& table = builtin_gerund_table();
  CHECK(table.at("lie") == "lying");
  CHECK(table.at("tie") == "tying");
  CHECK(table.count("ride") == 0);
}
