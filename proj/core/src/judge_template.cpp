#include "ifrl/coldstart.hpp"

namespace ifrl::coldstart {
namespace {

// Version: fluency_judge_v1. Changing either text requires bumping
// kJudgeTemplateVersion.
constexpr std::string_view kEnglish =
    "Please act as a reviewer and evaluate the quality of the model's responses as an AI assistant.\n"
    "Your evaluation should prioritize the fluency and readability of the final answer. If the "
    "response is crafted solely to meet specific constraints and sacrifices natural flow or "
    "clarity, it should be rated poorly. For example, if the instruction requires the letter \"n\" "
    "to appear at least three times, and the response artificially includes multiple standalone "
    "instances of the letter \"n\" just to fulfill this requirement, such a response should receive "
    "a low score.\n"
    "Next, consider whether the response fulfills the instruction requirements, and evaluate it "
    "strictly according to the scoring criteria below:\n"
    "1) Score: 1–2, Criteria: The response is of poor quality, lacks fluency, and is written "
    "solely to satisfy the instruction constraints without regard for the overall quality of the "
    "reply.\n"
    "2) Score: 3–5, Criteria: The response is generally readable but lacks overall fluency and "
    "smoothness.\n"
    "3) Score: 6–8, Criteria: The response is of relatively high quality, with generally fluent "
    "and coherent language.\n"
    "4) Score: 9–10, Criteria: The response is of high quality, with fluent, natural, and "
    "well-structured language.\n"
    "Please provide the following: 1) A brief explanation to evaluate the quality of the AI "
    "assistant's response. If there are any issues with response quality or language fluency, "
    "please identify and briefly explain them;\n"
    "2) Then provide an evaluation score, which must be strictly graded according to the following "
    "format: \"[[rating]]\", example: \"Score:[[4]]\".\n"
    "[Question]\n"
    "<question>\n"
    "[The Start of Assistant's Answer]\n"
    "<answer>\n"
    "[The End of Assistant's Answer]\n";

constexpr std::string_view kChinese =
    "请作为评审员，评估模型作为AI助手所给回复的质量。\n"
    "评估应优先考虑最终回答的流畅性和可读性。如果回复仅仅为了满足特定约束而牺牲了自然的表达或清晰度，"
    "应给予低分。例如，若指令要求字母“n”至少出现三次，而回复为了满足这一要求刻意插入多个孤立的字母“n”，"
    "这样的回复应得到低分。\n"
    "其次，考虑回复是否满足指令要求，并严格按照以下评分标准进行评估：\n"
    "1) 分数：1–2，标准：回复质量差，缺乏流畅性，仅为满足指令约束而写，不顾回复的整体质量。\n"
    "2) 分数：3–5，标准：回复基本可读，但整体不够流畅顺畅。\n"
    "3) 分数：6–8，标准：回复质量较高，语言总体流畅连贯。\n"
    "4) 分数：9–10，标准：回复质量高，语言流畅、自然、结构良好。\n"
    "请提供以下内容：1) 简要说明，评估AI助手回复的质量。如果回复质量或语言流畅性存在问题，请指出并简要解释；\n"
    "2) 然后给出评分，必须严格按照以下格式：\"[[rating]]\"，例如：\"Score:[[4]]\"。\n"
    "[Question]\n"
    "<question>\n"
    "[The Start of Assistant's Answer]\n"
    "<answer>\n"
    "[The End of Assistant's Answer]\n";

}  // namespace

std::string_view judge_template(constraints::Language language) {
  return language == constraints::Language::kZh ? kChinese : kEnglish;
}

}  // namespace ifrl::coldstart
