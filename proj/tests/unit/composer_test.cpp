/*
 * Copyright 2026 The mmqa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "mmqa/composer.hpp"
#include "mmqa/errors.hpp"
#include "mmqa/pipeline.hpp"
#include "mmqa/text.hpp"
#include "test_support.hpp"

namespace mmqa {
namespace {

AtomicQuestion leaf(std::string id, Modality m, std::string pl, AnswerList answers,
                    std::vector<EntityMention> mentions = {}) {
    AtomicQuestion q;
    q.id = std::move(id);
    q.modality = m;
    q.pl_text = std::move(pl);
    q.answers = std::move(answers);
    q.answer_kind = q.answers.is_entity_list() ? AnswerKind::entity : AnswerKind::string;
    q.mentions = std::move(mentions);
    return q;
}

Context people() {
    Context c;
    c.id = "people";
    c.table.page_title = "Presidents of the United States";
    c.table.table_title = "Presidents";
    c.table.columns = {{"Name", SemanticType::text, 0}};
    c.table.rows = {{Cell{"Barack Obama", {"Barack Obama"}, {}}}};
    return c;
}

Context rockets() {
    Context c;
    c.id = "rockets";
    c.table.page_title = "Space programs";
    c.table.table_title = "Launch vehicles";
    c.table.columns = {{"Program", SemanticType::text, 0},
                       {"Rocket", SemanticType::text, 1},
                       {"Creation year", SemanticType::numeric, 2}};
    c.table.rows = {
        {Cell{"Mercury program", {}, {}}, Cell{"Atlas LV-3B", {"Atlas LV-3B"}, {}}, Cell{"1957", {}, {}}},
        {Cell{"Gemini program", {}, {}}, Cell{"Titan II GLV", {"Titan II GLV"}, {}}, Cell{"1962", {}, {}}},
        {Cell{"Appolo program", {}, {}}, Cell{"Saturn V", {"Saturn V"}, {}}, Cell{"1967", {}, {}}},
    };
    return c;
}

Program obama_outer() {
    return Program::leaf(leaf("born", Modality::text, "Where was Barack Obama born?",
                              AnswerList::strings({"Honolulu"}), {{"Barack Obama", "Barack Obama"}}));
}

Program obama_inner() {
    return Program::leaf(leaf("pres44", Modality::table, "Who was the 44th president of the USA?",
                              AnswerList::entities({"Barack Obama"})));
}

TEST(Compose, RendersInnerAsNounPhrase) {
    const Context c = people();
    const auto q = compose(obama_outer(), obama_inner(), c);
    EXPECT_EQ(render_body(q.program, c), "Where was the 44th president of the USA born?");
    EXPECT_EQ(q.pl_text, "In the Presidents of Presidents of the United States, where was the 44th president of the "
                         "USA born?");
    EXPECT_EQ(q.answers.values, std::vector<std::string>{"Honolulu"});
    ASSERT_TRUE(q.intermediate_answers);
    EXPECT_EQ(q.intermediate_answers->values, std::vector<std::string>{"Barack Obama"});
    EXPECT_EQ(q.modalities_used, (std::set<Modality>{Modality::text, Modality::table}));
    EXPECT_TRUE(q.multimodal());
}

TEST(Compose, NonCopulaWhWordIsLowercased) {
    const Context c = people();
    const auto inner = Program::leaf(
        leaf("who44", Modality::table, "Which man was the 44th president?", AnswerList::entities({"Barack Obama"})));
    EXPECT_EQ(render_body(Program::compose(obama_outer(), inner), c),
              "Where was which man was the 44th president born?");
}

TEST(Compose, OuterWithTwoMentionsIsRejected) {
    const Context c = people();
    const auto outer = Program::leaf(leaf("two", Modality::text, "Did Barack Obama meet Angela Merkel?",
                                          AnswerList::strings({"yes"}),
                                          {{"Barack Obama", "Barack Obama"}, {"Angela Merkel", "Angela Merkel"}}));
    EXPECT_THROW(compose(outer, obama_inner(), c), CompositionError);
}

TEST(Compose, InnerMustAnswerTheMentionedEntity) {
    const Context c = people();
    const auto wrong = Program::leaf(
        leaf("pres43", Modality::table, "Who was the 43rd president?", AnswerList::entities({"George W. Bush"})));
    EXPECT_THROW(compose(obama_outer(), wrong, c), CompositionError);
    const auto many = Program::leaf(leaf("presidents", Modality::table, "Who were presidents?",
                                         AnswerList::entities({"Barack Obama", "George W. Bush"})));
    EXPECT_THROW(compose(obama_outer(), many, c), CompositionError);
    const auto plain = Program::leaf(
        leaf("str", Modality::table, "Who was the 44th president?", AnswerList::strings({"Barack Obama"})));
    EXPECT_THROW(compose(obama_outer(), plain, c), CompositionError);
}

TEST(Compose, MentionMatchIsNormalized) {
    const Context c = people();
    const auto inner = Program::leaf(
        leaf("pres44", Modality::table, "Who was the 44th president?", AnswerList::entities({"barack  OBAMA"})));
    EXPECT_NO_THROW(compose(obama_outer(), inner, c));
}

Program born_in_hawaii() {
    return Program::leaf(leaf("hawaii", Modality::table, "Who was born in Hawaii?",
                              AnswerList::entities({"Barack Obama", "Bruno Mars", "Nicole Kidman"})));
}

Program parent_of_sasha() {
    return Program::leaf(leaf("sasha", Modality::text, "Who is the parent of Sasha Obama?",
                              AnswerList::entities({"Michelle Obama", "Barack Obama"})));
}

TEST(Intersect, RendersConjunction) {
    const Context c = people();
    const auto q = intersect(born_in_hawaii(), parent_of_sasha(), c);
    EXPECT_EQ(render_body(q.program, c), "Who was born in Hawaii and is the parent of Sasha Obama?");
    EXPECT_EQ(q.answers.values, std::vector<std::string>{"Barack Obama"});
    ASSERT_TRUE(q.intermediate_answers);
    EXPECT_EQ(q.intermediate_answers->values.size(), 3u);
}

TEST(Intersect, KeepsLeftOrder) {
    const Context c = people();
    auto side = [](std::string id, std::vector<std::string> v) {
        return Program::leaf(leaf(std::move(id), Modality::table, "Which letters?", AnswerList::entities(std::move(v))));
    };
    const auto q = intersect(side("l", {"A", "B", "C"}), side("r", {"D", "C", "B"}), c);
    EXPECT_EQ(q.answers.values, (std::vector<std::string>{"B", "C"}));
    EXPECT_THROW(intersect(side("l", {"A", "B"}), side("r", {"C", "D"}), c), CompositionError);
}

TEST(Intersect, SingleElementArgumentIsRejected) {
    const Context& rca = *testing::mini_corpus().find_context("rca_records_2011");
    const auto released = Program::leaf(leaf("dec", Modality::table, "Which albums were released in December 2011?",
                                             AnswerList::entities({"TY.O", "Back to Love"})));
    const auto one = Program::leaf(leaf("one", Modality::image_list, "Which album cover shows a man in a hat?",
                                        AnswerList::entities({"Back to Love"})));
    const auto two = Program::leaf(leaf("two", Modality::image_list, "Which album covers show a man?",
                                        AnswerList::entities({"Back to Love", "Hands All Over"})));
    EXPECT_THROW(intersect(released, one, rca), CompositionError);
    const auto q = intersect(released, two, rca);
    EXPECT_EQ(q.answers.values, std::vector<std::string>{"Back to Love"});
    EXPECT_EQ(q.modalities_used.size(), 2u);
}

Program rocket_of(const std::string& program, const std::string& rocket) {
    return Program::leaf(leaf("rocket-" + program, Modality::text, "What is the rocket of " + program + "?",
                              AnswerList::entities({rocket})));
}

TEST(Compare, RendersSuperlativeChoice) {
    const Context c = rockets();
    const auto q = compare(rocket_of("Appolo program", "Saturn V"), rocket_of("Gemini program", "Titan II GLV"), 2,
                           Extremum::max, c);
    EXPECT_EQ(render_body(q.program, c),
              "What has most recent creation year, the rocket of Appolo program, or the rocket of Gemini program?");
    EXPECT_EQ(q.answers.values, std::vector<std::string>{"Saturn V"});
    ASSERT_TRUE(q.intermediate_answers);
    EXPECT_EQ(q.intermediate_answers->values, (std::vector<std::string>{"Saturn V", "Titan II GLV"}));
    const auto earliest = compare(rocket_of("Appolo program", "Saturn V"),
                                  rocket_of("Gemini program", "Titan II GLV"), 2, Extremum::min, c);
    EXPECT_EQ(earliest.answers.values, std::vector<std::string>{"Titan II GLV"});
    EXPECT_NE(earliest.pl_text.find("earliest creation year"), std::string::npos);
}

TEST(Compare, FilmographyYears) {
    const Context c = testing::filmography();
    const auto left = Program::leaf(leaf("furie", Modality::table, "Which film was directed by Sidney J. Furie?",
                                         AnswerList::entities({"A Dangerous Age"})));
    const auto right = Program::leaf(leaf("jesse", Modality::text, "What film is about Jesse?",
                                          AnswerList::entities({"Tell Me That You Love Me, Junie Moon"})));
    const auto latest = compare(left, right, 0, Extremum::max, c);
    EXPECT_EQ(latest.answers.values, std::vector<std::string>{"Tell Me That You Love Me, Junie Moon"});
    EXPECT_EQ(latest.pl_text, "In the Filmography of Ben Piazza, what has most recent year, film was directed by "
                              "Sidney J. Furie, or film is about Jesse?");
    const auto first = compare(left, right, 0, Extremum::min, c);
    EXPECT_EQ(first.answers.values, std::vector<std::string>{"A Dangerous Age"});
}

TEST(Compare, Preconditions) {
    const Context c = rockets();
    const auto apollo = rocket_of("Appolo program", "Saturn V");
    EXPECT_THROW(compare(apollo, rocket_of("Gemini program", "Titan II GLV"), 1, Extremum::max, c), CompositionError);
    EXPECT_THROW(compare(apollo, rocket_of("Gemini program", "Titan II GLV"), 7, Extremum::max, c), CompositionError);
    EXPECT_THROW(compare(apollo, rocket_of("Soyuz programme", "Soyuz"), 2, Extremum::max, c), CompositionError);
    EXPECT_THROW(compare(apollo, apollo, 2, Extremum::max, c), CompositionError);
    const auto pair = Program::leaf(leaf("pair", Modality::table, "Which rockets flew crews?",
                                         AnswerList::entities({"Saturn V", "Titan II GLV"})));
    EXPECT_THROW(compare(apollo, pair, 2, Extremum::max, c), CompositionError);
}

TEST(Compare, TiesAreRejected) {
    Context c = rockets();
    c.table.rows[1][2].text = "1967";
    EXPECT_THROW(compare(rocket_of("Appolo program", "Saturn V"), rocket_of("Gemini program", "Titan II GLV"), 2,
                         Extremum::max, c),
                 CompositionError);
}

TEST(Compare, PhraseDependsOnColumnType) {
    Context c = rockets();
    c.table.columns[2].header = "Thrust";
    c.table.rows = {{Cell{"a", {}, {}}, Cell{"x", {}, {}}, Cell{"7.5", {}, {}}},
                    {Cell{"b", {}, {}}, Cell{"y", {}, {}}, Cell{"12.25", {}, {}}}};
    EXPECT_EQ(compare_phrase(c.table, 2, Extremum::max), "highest");
    EXPECT_EQ(compare_phrase(c.table, 2, Extremum::min), "lowest");
    const Context f = testing::filmography();
    EXPECT_EQ(compare_phrase(f.table, 0, Extremum::max), "most recent");
    EXPECT_EQ(compare_phrase(f.table, 0, Extremum::min), "earliest");
}

TEST(Program, DepthIsLimitedToTwo) {
    const Context c = people();
    const auto inner = Program::compose(obama_outer(), obama_inner());
    const auto nested = Program::intersect(Program::intersect(born_in_hawaii(), parent_of_sasha()), born_in_hawaii());
    EXPECT_EQ(inner.depth(), 1u);
    EXPECT_EQ(nested.depth(), 2u);
    const auto deep = Program::intersect(nested, born_in_hawaii());
    EXPECT_EQ(deep.depth(), 3u);
    EXPECT_THROW(make_question(deep, c), CompositionError);
    EXPECT_EQ(obama_outer().leaves().size(), 1u);
    EXPECT_EQ(nested.leaves().size(), 3u);
}

TEST(RenderPl, PrefixAppearsOnceForNestedPrograms) {
    const Context c = testing::filmography();
    const auto left = Program::leaf(leaf("furie", Modality::table, "Which film was directed by Sidney J. Furie?",
                                         AnswerList::entities({"A Dangerous Age"})));
    const auto right = Program::leaf(
        leaf("mask", Modality::text, "Which film is Mask?", AnswerList::entities({"Mask"})));
    const std::string pl = render_pl(Program::compare(left, right, 0, Extremum::max), c);
    const std::string prefix = "In the Filmography of Ben Piazza, ";
    EXPECT_EQ(pl.rfind(prefix, 0), 0u);
    EXPECT_EQ(pl.find(prefix, 1), std::string::npos);
    EXPECT_EQ(render_pl(left, c), prefix + "which film was directed by Sidney J. Furie?");
}

TEST(CanonicalKey, DistinguishesOperationAndOrder) {
    const auto a = Program::intersect(born_in_hawaii(), parent_of_sasha());
    const auto b = Program::intersect(parent_of_sasha(), born_in_hawaii());
    EXPECT_EQ(canonical_program_key(a), "intersect(q:hawaii,q:sasha)");
    EXPECT_NE(canonical_program_key(a), canonical_program_key(b));
    const auto r = Program::compare(rocket_of("A", "x"), rocket_of("B", "y"), 2, Extremum::min);
    EXPECT_EQ(canonical_program_key(r), "compare[2,min](q:rocket-A,q:rocket-B)");
}

TEST(Modalities, ImageAndImageListShareAnAnswerer) {
    const auto img = Program::leaf(leaf("i", Modality::image, "What is shown?", AnswerList::strings({"horse"})));
    const auto lst = Program::leaf(leaf("l", Modality::image_list, "Which show a horse?",
                                        AnswerList::entities({"A", "B"})));
    EXPECT_EQ(modalities_used(Program::intersect(img, lst)).size(), 1u);
    const auto txt = Program::leaf(leaf("t", Modality::text, "Who?", AnswerList::entities({"A", "C"})));
    EXPECT_EQ(modalities_used(Program::intersect(txt, lst)).size(), 2u);
}

GenerateConfig generate_config() {
    GenerateConfig config;
    config.seed = testing::kSeed;
    return config;
}

TEST(Instantiate, FilmographyYieldsComposeAndCompare) {
    const Context c = testing::filmography();
    const auto bank = build_atomic_bank(testing::mini_corpus(), c, generate_config());
    InstantiateConfig config;
    config.seed = testing::kSeed;
    const auto qs = instantiate_templates(c, bank, TemplateRegistry::builtin(), config);
    auto has = [&](auto pred) { return std::any_of(qs.begin(), qs.end(), pred); };
    EXPECT_TRUE(has([](const ComposedQuestion& q) {
        return q.program.op == Operation::compose && q.program.children[0].atomic->modality == Modality::text &&
               q.program.children[1].atomic->modality == Modality::table;
    }));
    EXPECT_TRUE(has([](const ComposedQuestion& q) { return q.program.op == Operation::compare; }));

    std::map<std::string, std::size_t> per_type;
    for (const auto& q : qs) ++per_type[q.program.question_type];
    for (const auto& [type, n] : per_type) EXPECT_LE(n, config.max_per_template) << type;

    const auto again = instantiate_templates(c, bank, TemplateRegistry::builtin(), config);
    ASSERT_EQ(again.size(), qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) EXPECT_EQ(again[i].program, qs[i].program);
}

TEST(Instantiate, NoImagesMeansNoImageTemplates) {
    Context c = testing::filmography();
    auto bank = build_atomic_bank(testing::mini_corpus(), c, generate_config());
    c.images.clear();
    for (auto& row : c.table.rows) {
        for (auto& cell : row) cell.image_id.reset();
    }
    bank.erase(std::remove_if(bank.begin(), bank.end(),
                              [](const AtomicQuestion& q) {
                                  return answerer_modality(q.modality) == Modality::image;
                              }),
               bank.end());
    const auto qs = instantiate_templates(c, bank, TemplateRegistry::builtin());
    EXPECT_FALSE(qs.empty());
    for (const auto& q : qs) {
        EXPECT_EQ(q.program.question_type.find("Image"), std::string::npos) << q.program.question_type;
    }
}

TEST(Instantiate, EmittedQuestionsAreNonDegenerate) {
    for (const auto& e : testing::mini_dataset().examples) {
        ASSERT_FALSE(e.answers.empty()) << e.qid;
        for (std::size_t i = 0; i < e.answers.size(); ++i) {
            EXPECT_FALSE(text::contains_normalized(e.pl_question, e.answers.values[i])) << e.qid;
        }
        if (e.program.op == Operation::compose && e.intermediate_answers) {
            EXPECT_NE(text::normalize_for_match(e.answers.values.front()),
                      text::normalize_for_match(e.intermediate_answers->values.front()))
                << e.qid;
        }
        const std::string prefix = open_domain_prefix(e.context.table);
        EXPECT_EQ(e.pl_question.rfind(prefix, 0), 0u) << e.qid;
        EXPECT_EQ(e.pl_question.find(prefix, 1), std::string::npos) << e.qid;
    }
}

} // namespace
} // namespace mmqa
