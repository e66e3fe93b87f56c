#include "cprofile/engine/interpreter.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "cprofile/util/overloaded.hpp"

namespace cprofile::engine {

namespace {

using Env = std::map<std::string, std::string>;

void emit(EvalContext& ctx, decltype(TraceEvent::event) event) {
    if (ctx.trace != nullptr) ctx.trace->push_back(TraceEvent{ctx.segment_id, std::move(event)});
}

Tri check(const dsl::Check& node, EvalContext& ctx) {
    if (auto hit = ctx.cache.find(ctx.scene.id, node.question)) {
        emit(ctx, Checked{node.question, hit->verdict, hit->source, true});
        return hit->verdict;
    }
    ConditionVerdict answer = ctx.oracle.check_condition(ctx.scene, node.question);
    const bool provider_cached = answer.cached;
    const ConditionVerdict committed = ctx.cache.commit(ctx.scene.id, node.question, answer);
    emit(ctx, Checked{node.question, committed.verdict, committed.source, provider_cached});
    return committed.verdict;
}

class SegmentRunner {
public:
    SegmentRunner(EvalContext& ctx, std::vector<TriggeredStatement>& out) : ctx_(ctx), out_(out) {}

    void run_block(const dsl::Block& block, Env env, std::vector<std::size_t>& path, bool uncertain) {
        for (const auto& stmt : block) {
            std::visit(overloaded{
                           [&](const dsl::If& node) { run_if(node, env, path, uncertain); },
                           [&](const dsl::Trigger& t) {
                               std::string text = resolve(t.value, env);
                               emit(ctx_, Triggered{text});
                               out_.push_back(TriggeredStatement{std::move(text), ctx_.segment_id, path, uncertain});
                           },
                           [&](const dsl::Let& l) { env[l.name] = resolve(l.value, env); },
                       },
                       stmt.node);
        }
    }

private:
    void run_if(const dsl::If& node, const Env& env, std::vector<std::size_t>& path, bool uncertain) {
        Tri guard = eval_expr(node.guard, ctx_);
        if (guard == Tri::True) {
            take(BranchTaken{BranchTaken::Kind::Then, 0}, 0, node.then, env, path, uncertain);
            return;
        }
        bool saw_unknown = guard == Tri::Unknown;
        for (std::size_t i = 0; i < node.elifs.size(); ++i) {
            guard = eval_expr(node.elifs[i].guard, ctx_);
            if (guard == Tri::True) {
                take(BranchTaken{BranchTaken::Kind::Elif, i}, i + 1, node.elifs[i].body, env, path, uncertain || saw_unknown);
                return;
            }
            saw_unknown = saw_unknown || guard == Tri::Unknown;
        }
        if (node.else_) {
            take(BranchTaken{BranchTaken::Kind::Else, 0}, node.elifs.size() + 1, *node.else_, env, path, uncertain || saw_unknown);
            return;
        }
        emit(ctx_, BranchTaken{BranchTaken::Kind::Skipped, 0});
    }

    void take(BranchTaken branch, std::size_t arm, const dsl::Block& body, const Env& env, std::vector<std::size_t>& path,
              bool uncertain) {
        emit(ctx_, branch);
        path.push_back(arm);
        run_block(body, env, path, uncertain);
        path.pop_back();
    }

    std::string resolve(const dsl::StrExpr& e, const Env& env) {
        return std::visit(overloaded{
                              [](const dsl::Literal& l) { return l.text; },
                              [&](const dsl::Var& v) {
                                  auto it = env.find(v.name);
                                  if (it == env.end()) throw std::logic_error("unbound identifier " + v.name + " in a parsed program");
                                  return it->second;
                              },
                              [&](const dsl::Choice& c) {
                                  const std::size_t i = ctx_.rng.index(c.options.size());
                                  emit(ctx_, ChoiceMade{c.options, i});
                                  return c.options[i];
                              },
                          },
                          e.node);
    }

    EvalContext& ctx_;
    std::vector<TriggeredStatement>& out_;
};

}  // namespace

nlohmann::ordered_json to_json(const TriggeredStatement& s) {
    nlohmann::ordered_json j;
    j["text"] = s.text;
    j["segment_id"] = s.segment_id;
    j["path"] = s.path;
    j["uncertain"] = s.uncertain;
    return j;
}

TriggeredStatement triggered_from_json(const nlohmann::json& j) {
    return TriggeredStatement{j.at("text").get<std::string>(), j.at("segment_id").get<std::string>(),
                              j.value("path", std::vector<std::size_t>{}), j.value("uncertain", false)};
}

Tri eval_expr(const dsl::Expr& expr, EvalContext& ctx) {
    return std::visit(overloaded{
                          [&](const dsl::Check& c) { return check(c, ctx); },
                          [&](const dsl::Chance& c) {
                              const double draw = ctx.rng.uniform();
                              const bool passed = draw < c.p;
                              emit(ctx, ChanceDrawn{c.p, draw, passed});
                              return from_bool(passed);
                          },
                          [](const dsl::Const& c) { return from_bool(c.value); },
                          [&](const dsl::Not& n) { return kleene_not(eval_expr(*n.inner, ctx)); },
                          [&](const dsl::And& a) {
                              const Tri left = eval_expr(*a.left, ctx);
                              if (left == Tri::False) return Tri::False;
                              return kleene_and(left, eval_expr(*a.right, ctx));
                          },
                          [&](const dsl::Or& o) {
                              const Tri left = eval_expr(*o.left, ctx);
                              if (left == Tri::True) return Tri::True;
                              return kleene_or(left, eval_expr(*o.right, ctx));
                          },
                      },
                      expr.node);
}

Execution execute_segment(const dsl::Program& program, const Scene& scene, ConditionOracle& oracle, const RunSeed& seed,
                          OracleCache* cache) {
    OracleCache local;
    RandomStream rng(seed, program.segment_id);
    Execution result;
    EvalContext ctx{scene, oracle, cache != nullptr ? *cache : local, rng, program.segment_id, &result.trace};
    std::vector<std::size_t> path;
    SegmentRunner(ctx, result.statements).run_block(program.body, {}, path, false);
    return result;
}

Execution execute_profile(const std::vector<dsl::Program>& programs, const Scene& scene, ConditionOracle& oracle,
                          const RunSeed& seed, OracleCache* cache) {
    std::set<std::string> ids;
    for (const auto& p : programs) {
        if (!ids.insert(p.segment_id).second) throw std::invalid_argument("duplicate segment id " + p.segment_id);
    }
    OracleCache local;
    OracleCache& memo = cache != nullptr ? *cache : local;
    Execution all;
    for (const auto& program : programs) {
        Execution part;
        try {
            part = execute_segment(program, scene, oracle, seed, &memo);
        } catch (const OracleUnavailable& e) {
            throw OracleUnavailable(std::string(e.what()) + " (segment " + program.segment_id + ")", program.segment_id);
        }
        all.statements.insert(all.statements.end(), std::make_move_iterator(part.statements.begin()),
                              std::make_move_iterator(part.statements.end()));
        all.trace.insert(all.trace.end(), std::make_move_iterator(part.trace.begin()), std::make_move_iterator(part.trace.end()));
    }
    return all;
}

}  // namespace cprofile::engine
