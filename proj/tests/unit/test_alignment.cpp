#include <doctest.h>

#include <sstream>

#include "pathmine/adaptation.hpp"
#include "pathmine/alignment.hpp"
#include "pathmine/errors.hpp"
#include "test_support.hpp"

using namespace pathmine;
using test_support::ExhaustiveAligner;
using test_support::make_trace;
using test_support::sequence_net;

TEST_CASE("perfectly fitting trace aligns all-synchronously") {
  const PetriNet net = sequence_net({"a", "b"});
  const Alignment alignment = align(make_trace("c1", {"a", "b"}), net);
  CHECK(alignment.cost == 0.0);
  CHECK(alignment.fitness == 1.0);
  REQUIRE(alignment.moves.size() == 2);
  for (const auto& move : alignment.moves) CHECK(move.is_synchronous());
}

TEST_CASE("partially fitting trace: <a,b> against a->c") {
  const PetriNet net = sequence_net({"a", "c"});
  const Trace trace = make_trace("c1", {"a", "b"});

  // frozen from the exhaustive oracle: sync a, log b, model c
  ExhaustiveAligner oracle(net);
  CHECK(oracle.min_cost(trace.activities) == 2.0);

  const Alignment alignment = align(trace, net);
  CHECK(alignment.cost == 2.0);
  // denominator = 1*2 (log moves) + 2 (model path) = 4
  CHECK(alignment.fitness == doctest::Approx(0.5).epsilon(1e-12));

  int log_moves = 0, model_moves = 0, sync_moves = 0;
  for (const auto& move : alignment.moves) {
    if (move.is_log_move()) ++log_moves;
    if (move.is_model_move()) ++model_moves;
    if (move.is_synchronous()) ++sync_moves;
  }
  CHECK(sync_moves == 1);
  CHECK(log_moves == 1);
  CHECK(model_moves == 1);
}

TEST_CASE("fully foreign trace has fitness zero") {
  const PetriNet net = sequence_net({"a", "b"});
  const Trace trace = make_trace("c1", {"x"});
  ExhaustiveAligner oracle(net);
  CHECK(oracle.min_cost(trace.activities) == 3.0);
  const Alignment alignment = align(trace, net);
  CHECK(alignment.cost == 3.0);
  CHECK(alignment.fitness == 0.0);
}

TEST_CASE("alignment projections reproduce the trace and a firing sequence") {
  test_support::TestRng rng(4242);
  for (int round = 0; round < 30; ++round) {
    const auto acts = test_support::activity_names(2 + static_cast<int>(rng.below(4)));
    const auto compiled = compile_tree(test_support::random_process_tree(acts, rng), "m");
    std::vector<std::string> trace_acts;
    const std::size_t len = 1 + rng.below(5);
    for (std::size_t i = 0; i < len; ++i) {
      // mix known and foreign activities
      trace_acts.push_back(rng.below(4) == 0 ? "zz" : acts[rng.below(acts.size())]);
    }
    const Trace trace = make_trace("c", trace_acts);
    const Alignment alignment = align(trace, compiled.net);

    // log-side projection equals the trace
    std::vector<std::string> log_side;
    for (const auto& move : alignment.moves)
      if (move.log_activity) log_side.push_back(*move.log_activity);
    CHECK(log_side == trace_acts);

    // model-side projection is a firing sequence into the final marking
    Marking marking = compiled.net.initial_marking();
    bool valid = true;
    for (const auto& move : alignment.moves) {
      if (!move.transition_id) continue;
      if (!enabled_transitions(compiled.net, marking).count(*move.transition_id)) {
        valid = false;
        break;
      }
      marking = fire(compiled.net, marking, *move.transition_id);
    }
    CHECK(valid);
    CHECK(marking == compiled.net.final_marking());

    // no (gap, gap) moves; fitness within bounds, zero cost iff fitness 1
    for (const auto& move : alignment.moves)
      CHECK((move.log_activity.has_value() || move.transition_id.has_value()));
    CHECK(alignment.fitness >= 0.0);
    CHECK(alignment.fitness <= 1.0);
    CHECK((alignment.cost == 0.0) == (alignment.fitness == 1.0));
  }
}

TEST_CASE("alignment cost matches the exhaustive oracle on random cases") {
  test_support::TestRng rng(77);
  int checked = 0;
  while (checked < 60) {
    const auto acts = test_support::activity_names(2 + static_cast<int>(rng.below(3)));
    const auto compiled = compile_tree(test_support::random_process_tree(acts, rng, 2), "m");
    if (compiled.net.transitions().size() > 8) continue;
    std::vector<std::string> trace_acts;
    const std::size_t len = 1 + rng.below(6);
    for (std::size_t i = 0; i < len; ++i)
      trace_acts.push_back(rng.below(5) == 0 ? "zz" : acts[rng.below(acts.size())]);
    ExhaustiveAligner oracle(compiled.net);
    const double expected = oracle.min_cost(trace_acts);
    const Alignment actual = align(make_trace("c", trace_acts), compiled.net);
    CHECK(actual.cost == expected);
    ++checked;
  }
}

TEST_CASE("state budget is enforced") {
  const PetriNet net = sequence_net({"a", "b", "c"});
  CHECK_THROWS_AS(align(make_trace("c1", {"a", "b", "c"}), net, {}, 2), StateBudgetExceeded);
}

TEST_CASE("diagnosis_row counts log and visible model moves") {
  const std::vector<std::string> columns{"a", "b", "c"};
  SUBCASE("perfect fit gives an all-zero row") {
    const Alignment alignment = align(make_trace("c1", {"a", "b"}), sequence_net({"a", "b"}));
    const DiagnosisRow row = diagnosis_row(alignment, columns);
    CHECK(row.counts == std::vector<int>{0, 0, 0});
    CHECK(row.fitness == 1.0);
  }
  SUBCASE("the 0.5-fitness case charges b and c") {
    const Alignment alignment = align(make_trace("c1", {"a", "b"}), sequence_net({"a", "c"}));
    const DiagnosisRow row = diagnosis_row(alignment, columns);
    CHECK(row.counts == std::vector<int>{0, 1, 1});
  }
  SUBCASE("repeated log moves accumulate") {
    const Alignment alignment = align(make_trace("c1", {"b", "a", "a", "a"}),
                                      sequence_net({"b"}));
    const DiagnosisRow row = diagnosis_row(alignment, columns);
    CHECK(row.counts == std::vector<int>{3, 0, 0});
  }
  SUBCASE("activities outside the column alphabet are rejected") {
    const Alignment alignment = align(make_trace("c1", {"x"}), sequence_net({"a"}));
    CHECK_THROWS_AS(diagnosis_row(alignment, columns), UnknownActivity);
  }
}

TEST_CASE("compute_diagnoses keeps the best-fitness model per trace") {
  KnowledgeBase kb;
  kb.add(sequence_net({"a", "c"}, "model_0"), {});
  kb.add(sequence_net({"a", "b"}, "model_1"), {});
  const EventLog log = pathmine::make_log({make_trace("c1", {"a", "b"})});

  const DiagnosisMatrix matrix = compute_diagnoses(log, kb);
  REQUIRE(matrix.rows.size() == 1);
  CHECK(matrix.rows[0].fitness == 1.0);
  CHECK(matrix.rows[0].model_ref == "model_1");
  CHECK(matrix.column_alphabet == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("compute_diagnoses with one model matches per-trace rows") {
  KnowledgeBase kb;
  kb.add(sequence_net({"a", "b"}, "only"), {});
  const EventLog log = pathmine::make_log({make_trace("c1", {"a", "b"}),
                                           make_trace("c2", {"a"})});
  const DiagnosisMatrix matrix = compute_diagnoses(log, kb);
  const Aligner aligner(kb.models()[0]);
  for (std::size_t i = 0; i < log.traces.size(); ++i) {
    const DiagnosisRow expected =
        diagnosis_row(aligner.align(log.traces[i]), matrix.column_alphabet);
    CHECK(matrix.rows[i].counts == expected.counts);
    CHECK(matrix.rows[i].fitness == expected.fitness);
  }
}

TEST_CASE("fitness ties keep the earlier model") {
  // both models miss the trace equally
  KnowledgeBase kb;
  kb.add(sequence_net({"a", "x"}, "first"), {});
  kb.add(sequence_net({"a", "y"}, "second"), {});
  const EventLog log = pathmine::make_log({make_trace("c1", {"a", "b"})});
  const DiagnosisMatrix matrix = compute_diagnoses(log, kb);
  CHECK(matrix.rows[0].model_ref == "first");
}

TEST_CASE("adding a model never lowers any trace's best fitness") {
  test_support::TestRng rng(123);
  for (int round = 0; round < 10; ++round) {
    KnowledgeBase kb;
    const auto acts = test_support::activity_names(3);
    kb.add(compile_tree(test_support::random_process_tree(acts, rng), "m0").net, {});
    const EventLog log = pathmine::make_log(
        {make_trace("c1", {acts[0], acts[2]}), make_trace("c2", {acts[1]})});
    const DiagnosisMatrix before = compute_diagnoses(log, kb);
    kb.add(compile_tree(test_support::random_process_tree(acts, rng), "m1").net, {});
    const DiagnosisMatrix after = compute_diagnoses(log, kb);
    for (std::size_t i = 0; i < log.traces.size(); ++i)
      CHECK(after.rows[i].fitness >= before.rows[i].fitness);
  }
}

TEST_CASE("all-zero diagnosis row iff fitness 1 under default costs") {
  test_support::TestRng rng(55);
  KnowledgeBase kb;
  kb.add(sequence_net({"a", "b"}, "m"), {});
  std::vector<Trace> traces;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> acts;
    const std::size_t len = 1 + rng.below(4);
    for (std::size_t j = 0; j < len; ++j)
      acts.push_back(std::vector<std::string>{"a", "b", "c"}[rng.below(3)]);
    traces.push_back(make_trace("c" + std::to_string(i), acts));
  }
  const EventLog log = pathmine::make_log(std::move(traces));
  const DiagnosisMatrix matrix = compute_diagnoses(log, kb);
  for (const auto& row : matrix.rows) {
    const bool all_zero =
        std::all_of(row.counts.begin(), row.counts.end(), [](int c) { return c == 0; });
    CHECK(all_zero == (row.fitness == 1.0));
  }
}

TEST_CASE("diagnosis csv layout") {
  KnowledgeBase kb;
  kb.add(sequence_net({"a", "b"}, "m"), {});
  const EventLog log = pathmine::make_log({make_trace("c1", {"a", "b"})});
  const DiagnosisMatrix matrix = compute_diagnoses(log, kb);
  std::ostringstream out;
  write_diagnoses_csv(matrix, out);
  CHECK(out.str() ==
        "a,b,fitness,model_ref\n"
        "0,0,1.000000,m\n");
}
